"""Simultaneous Diophantine approximation by iterated LLL."""

import json

from ._core import (  # noqa: F401
    BudgetExceeded,
    ContractViolation,
    Error,
    Instance,
    InvalidInstance,
    InvariantViolation,
    ParseError,
    __version__,
    approximate,
    best_approximations,
    ocf_distribution,
    ocf_samples,
    parse_instance,
    preset_names,
    random_instance,
    read_instance,
    recommended_precision,
    schedule,
    sup_distance_to_ocf,
    verify,
)
from . import _core


def certificate(instance):
    """Certificate for the run on `instance`, as a dict."""
    return json.loads(_core.certificate_json(instance))


def preset(name, paper_scale=False, seed=1):
    return json.loads(_core.preset_json(name, paper_scale, seed))


def _plan_text(plan):
    return plan if isinstance(plan, str) else json.dumps(plan)


def theta_samples(plan, dedup=True, threads=0):
    """Pooled theta values for one plan (dict or JSON text)."""
    return _core.theta_samples(_plan_text(plan), dedup, threads)


def run_experiment(plans, out, threads=0):
    """Write the CSV bundle for a plan set; returns the parsed manifest."""
    directory = _core.write_bundle(_plan_text(plans), str(out), threads)
    with open(f"{directory}/manifest.json") as f:
        return json.load(f)
