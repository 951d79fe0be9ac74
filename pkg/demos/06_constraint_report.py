"""Constraint accounting for the reference scenarios."""

from zkcred.circuits.accounting import accounting_report, static_reference_report
from zkcred.circuits.scenarios import SCENARIOS, assemble_vp_circuit

for name in ("I", "II", "III", "IV"):
    print(accounting_report(assemble_vp_circuit(SCENARIOS[name]), name).to_markdown())
for name in ("V", "VI", "VII"):
    print(static_reference_report(name).to_markdown())
