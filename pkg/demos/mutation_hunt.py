"""
Finding seeded bugs
===================

Each bundled model ships with a few deliberately broken variants. The
checker should produce a counterexample for every one of them.
"""

from skipcheck.models import MUTANTS
from skipcheck.wfsk import DomainSpec, check_model

domain = DomainSpec(capacity=2, imem_max=3, stack_max=2, reqs_max=3)
for model, mutants in sorted(MUTANTS.items()):
    for mutant in sorted(mutants):
        report = check_model(model, domain, mutant=mutant, max_counterexamples=1)
        print(f"{model:>6} {mutant:<15} {report.total_counterexamples:>6} counterexamples")
        if report.counterexamples:
            cex = report.counterexamples[0]
            print("       first:", cex.to_json()[:160], "...")
