"""Run a few probes programmatically and print the JSON report."""
from totpos.suite import ProbeConfig, run_suite

config = ProbeConfig.from_text("""
[harness]
seed = 7
probes = jks_det, tn3, homotopy

[homotopy]
homotopy.instances = 20
""")
doc = run_suite(config)
print(doc.to_json(with_timestamp=False))
raise SystemExit(doc.exit_code)
