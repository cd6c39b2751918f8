"""End-to-end runs: 3SAT -> QCSPP -> boost -> PCP -> label cover -> MWSPP.

Reports are plain dicts of JSON-ready values.  Exact quantities are
Fractions rendered as strings; nothing time-dependent goes into a report
(stage timings are returned separately) so two runs with the same config
serialise to identical bytes.
"""

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, InputError, ReductionError, TooManyEquations
from .field import field_new
from .hlcpp import (build_hlcpp, check_smoothness, check_uniformity, evaluate_labeling,
                    labeling_from_tables, prune_degenerate)
from .mwspp import build_mwspp, check_fixed_forms, honest_solution, solution_weight
from .pcp import (DEFAULT_MEM_BUDGET, estimate_acceptance, honest_prover, log2_exact, make_adversary,
                  prover_tables)
from .qcsp import (QcspInstance, QuadraticPolynomial, boost_soundness, brute_force_opt, circuit_assignment,
                   evaluate_qcsp, pad_to_power_of_two, parse_dimacs, planted_instance,
                   reduce_3sat_to_qcspp)
from .sumcheck import soundness_event_count, sumcheck_adversaries

TOYS = ("satisfiable", "unsatisfiable")


@dataclass
class PipelineConfig:
    r: int = 4
    modulus: str = None          # hex override of the default modulus
    m: int = None                # derived from the padded variable count when None
    seed: int = 0
    trials: int = 10 ** 4
    exact: bool = True
    budget_enum: int = 1 << 22
    budget_mem: int = DEFAULT_MEM_BUDGET
    input_path: str = None
    toy: str = "satisfiable"
    pad_clauses: bool = False
    workers: int = 1
    out_dir: str = None

    def __post_init__(self):
        if not 1 <= self.r <= 32:
            raise InputError(f"field exponent r = {self.r} outside 1..32")
        if self.m is not None and self.m < 1:
            raise InputError("m must be at least 1")
        if self.trials < 1 or self.budget_enum < 1 or self.budget_mem < 1 or self.workers < 1:
            raise InputError("trials, budgets and workers must be positive")
        if self.input_path is None and self.toy not in TOYS:
            raise InputError(f"unknown toy {self.toy!r}; choose from {TOYS}")

    def spec(self):
        return field_new(self.r, None if self.modulus is None else int(self.modulus, 16))

    def to_json(self):
        out = asdict(self)
        out.pop("out_dir")
        out.pop("workers")
        return out


class StageError(ReductionError):
    """A stage failure, tagged with the stage that raised it."""

    def __init__(self, stage, err):
        super().__init__(f"{stage}: {err}")
        self.stage = stage
        self.cause = err


def digest(obj):
    data = json.dumps(obj, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(data).hexdigest()


def array_digest(*arrays):
    h = hashlib.sha256()
    for a in arrays:
        h.update(np.ascontiguousarray(a, dtype=np.int64).tobytes())
    return h.hexdigest()


def table_digest(T):
    return array_digest(T.points, T.lines, *T.psums)


def dumps_report(report):
    return json.dumps(report, sort_keys=True, indent=1) + "\n"


# ---------------------------------------------------------------------------
# built-in instances

def toy_instance(name, spec, seed=0):
    """(QCSPP instance before boosting, satisfying assignment or None)."""
    if name == "satisfiable":
        P, A = planted_instance(spec, 4, 3, np.random.default_rng(seed))
        return P, A
    if name == "unsatisfiable":
        eqs = [((0, 1), 1), ((0, 0), 1), ((1, 1), 1)]
        lhs = tuple(QuadraticPolynomial.build(spec, 2, [e]) for e in eqs)
        return QcspInstance(spec, 2, lhs, (1, 1, 0)), None
    raise InputError(f"unknown toy {name!r}")


def _stage(name, fn, timings):
    t0 = time.perf_counter()
    try:
        return fn()
    except (BudgetExceeded, InputError, TooManyEquations):
        raise
    except ReductionError as err:
        raise StageError(name, err) from err
    finally:
        timings[name] = time.perf_counter() - t0


def load_input(config, timings):
    """QCSPP instance, satisfying assignment (or None) and an input description."""
    spec = config.spec()
    if config.input_path is None:
        P, A = _stage("input", lambda: toy_instance(config.toy, spec, config.seed), timings)
        return P, A, {"kind": "toy", "name": config.toy, "sha256": digest(P.to_json())}
    with open(config.input_path, "rb") as fh:
        raw = fh.read()
    phi = _stage("parse", lambda: parse_dimacs(raw.decode(), config.pad_clauses), timings)
    Q = _stage("reduce", lambda: reduce_3sat_to_qcspp(phi, spec), timings)
    bits = phi.find_assignment()
    A = None if bits is None else circuit_assignment(Q, phi, bits)
    Qp = pad_to_power_of_two(Q)
    if A is not None:
        A = tuple(A) + (0,) * (Qp.n - Q.n)
    info = {"kind": "dimacs", "sha256": hashlib.sha256(raw).hexdigest(),
            "variables": phi.n, "clauses": len(phi.clauses)}
    return Qp, A, info


# ---------------------------------------------------------------------------
# pipeline

def run_pipeline(config):
    """Run every stage; returns (report, timings)."""
    timings = {}
    spec = config.spec()
    P0, A, info = load_input(config, timings)
    n = P0.n
    if n & (n - 1):
        P0 = pad_to_power_of_two(P0)
        A = None if A is None else tuple(A) + (0,) * (P0.n - n)
    m = log2_exact(P0.n) if config.m is None else config.m
    if P0.n != 1 << m:
        raise InputError(f"m = {m} does not match n = {P0.n} variables")
    report = {"config": config.to_json(), "input": info, "stages": {}}
    st = report["stages"]
    st["qcsp"] = {"n": P0.n, "k": P0.k, "m": m, "sha256": digest(P0.to_json())}
    P = _stage("boost", lambda: boost_soundness(P0), timings)
    st["boost"] = {"k": P.k, "sha256": digest(P.to_json())}

    satisfied = A is not None and evaluate_qcsp(P, A) == 1
    st["completeness"] = {"satisfied": satisfied,
                          "value": None if A is None else str(evaluate_qcsp(P, A))}
    if not satisfied:
        st["completeness"]["error"] = "NotSatisfying"
        report["mode"] = "adversarial"
        report["adversarial"] = _adversarial(P, m, config, timings, P0.k)
        report["ok"] = report["adversarial"]["ok"]
        return report, timings
    report["mode"] = "completeness"

    T = _stage("prove", lambda: honest_prover(P, A, m, config.budget_mem), timings)
    st["pcp"] = {"tables_sha256": table_digest(T)}
    est = _stage("verify", lambda: _acceptance(T, P, config), timings)
    st["pcp"]["acceptance"] = est.to_json()

    def label_cover():
        hl = build_hlcpp(P, m, config.budget_mem)
        lab = labeling_from_tables(hl, T)
        return hl, lab, evaluate_labeling(hl, lab), prune_degenerate(hl)[1], check_smoothness(hl)
    hl, lab, value, prune, smooth = _stage("hlcpp", label_cover, timings)
    st["hlcpp"] = {"layer_sizes": hl.layer_sizes(), "honest_value": str(value),
                   "prune": prune.to_json(), "smoothness_structural": smooth.structural_ok,
                   "structure_sha256": digest({k: v for k, v in hl.to_json().items() if k != "allowable"})}

    def encode():
        imp = build_mwspp(hl, "implicit")
        sol = honest_solution(lab, imp)
        return check_fixed_forms(imp, sol), solution_weight(imp, sol)
    viol, weight = _stage("mwspp", encode, timings)
    st["mwspp"] = {"violations": len(viol), "normalized_weight": str(weight),
                   "expected_weight": 2 * m + 2}
    checks = {
        "pcp_accepts_always": est.accepted == est.total,
        "honest_labeling_satisfies_all": value == 1,
        "smoothness_structural": smooth.structural_ok,
        "mwspp_no_violations": not viol,
        "mwspp_weight_is_2m_plus_2": weight == 2 * m + 2,
    }
    report["checks"] = checks
    report["ok"] = all(checks.values())
    return report, timings


def _acceptance(T, P, config):
    q, m = P.spec.q, T.m
    total = P.k * q ** m * (q ** m - 1)
    if config.exact and total <= config.budget_enum:
        return estimate_acceptance(T, P, "exact", budget=config.budget_enum)
    return estimate_acceptance(T, P, "monte_carlo", trials=config.trials, seed=config.seed)


def _adversarial(P, m, config, timings, k_before):
    """No satisfying assignment: measure how well the best tables do."""
    opt, witness = _stage("opt", lambda: brute_force_opt(P, config.budget_enum), timings)
    bound = Fraction(k_before, P.spec.q)
    out = {"opt": str(opt), "opt_bound": str(bound), "opt_within_bound": opt <= bound,
           "witness": list(witness)}
    base = _stage("prove", lambda: prover_tables(P, witness, m, config.budget_mem), timings)
    rows = {}
    advs = {"best_assignment": base,
            "wrong_polynomial_patched": make_adversary("wrong_polynomial", base, P, seed=config.seed,
                                                       alt_assignment=witness, patch_sum=True),
            "zero_sums": make_adversary("zero_sums", base),
            "random_tables": make_adversary("random_tables", base, seed=config.seed)}
    for name, T in advs.items():
        rows[name] = _stage(f"verify:{name}", lambda T=T: _acceptance(T, P, config), timings).to_json()
    out["acceptance"] = rows
    out["ok"] = out["opt_within_bound"] and all(Fraction(r["probability"]) < 1 for r in rows.values())
    return out


# ---------------------------------------------------------------------------
# soundness experiments

def run_soundness_experiments(config):
    """Measured soundness quantities; returns (report, timings)."""
    timings = {}
    spec = config.spec()
    q = spec.q
    report = {"config": config.to_json(), "experiments": {}}
    ex = report["experiments"]

    # sum-check family, M = 2, d = 2, l = 1
    M, d = 2, 2
    advs = _stage("sumcheck_family", lambda: sumcheck_adversaries(spec, M, d, 120, config.seed), timings)
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        counts = list(pool.map(lambda a: soundness_event_count(spec, a), advs))
    bound = Fraction(M * d, q)
    rows = [{"kind": a.kind, "probability": str(Fraction(c, q ** M))} for a, c in zip(advs, counts)]
    ex["sumcheck"] = {"M": M, "d": d, "l": 1, "bound": str(bound), "adversaries": rows,
                      "max_probability": str(Fraction(max(counts), q ** M)),
                      "all_within_bound": all(Fraction(c, q ** M) <= bound for c in counts)}

    # boosting on the unsatisfiable toy
    Q, _ = toy_instance("unsatisfiable", spec)
    if Q.k <= q and q ** Q.n <= config.budget_enum:
        opt_q, _ = brute_force_opt(Q, config.budget_enum)
        P = boost_soundness(Q)
        opt_p, _ = brute_force_opt(P, config.budget_enum)
        ex["boost"] = {"k": Q.k, "q": q, "opt_before": str(opt_q), "opt_after": str(opt_p),
                       "bound": str(Fraction(Q.k, q)), "within_bound": opt_p <= Fraction(Q.k, q)}

    # PCP adversaries at m = 1 on a planted instance
    P0, A = planted_instance(spec, 2, 3, np.random.default_rng(config.seed))
    P = boost_soundness(P0) if P0.k <= q else P0
    T = honest_prover(P, A, 1, config.budget_mem)
    kinds = {"honest": T,
             "corrupt_points_10pct": make_adversary("corrupt_points", T, seed=config.seed, fraction=0.1),
             "zero_sums": make_adversary("zero_sums", T),
             "random_tables": make_adversary("random_tables", T, seed=config.seed),
             "wrong_polynomial_patched": make_adversary("wrong_polynomial", T, P, seed=config.seed,
                                                        patch_sum=True)}
    ex["pcp"] = {name: _stage(f"pcp:{name}", lambda T=T: _acceptance(T, P, config), timings).to_json()
                 for name, T in kinds.items()}

    # label cover structure
    m = config.m or 1
    P0, A = planted_instance(spec, 1 << m, 3, np.random.default_rng(config.seed))
    P = boost_soundness(P0) if P0.k <= q else P0

    def structure():
        hl = build_hlcpp(P, m, config.budget_mem)
        smooth = check_smoothness(hl, sampled_pairs=200, seed=config.seed)
        try:
            unif = check_uniformity(hl, config.budget_enum).to_json()
        except BudgetExceeded as err:
            unif = {"skipped": str(err)}
        pruned, rep = prune_degenerate(hl)
        try:
            unif_pruned = check_uniformity(pruned, config.budget_enum).to_json()
        except BudgetExceeded as err:
            unif_pruned = {"skipped": str(err)}
        return smooth.to_json(), unif, rep.to_json(), unif_pruned
    smooth, unif, prune, unif_pruned = _stage("hlcpp_structure", structure, timings)
    ex["hlcpp"] = {"m": m, "smoothness": smooth, "uniformity": unif, "prune": prune,
                   "uniformity_after_pruning": unif_pruned}
    report["ok"] = ex["sumcheck"]["all_within_bound"] and ex.get("boost", {}).get("within_bound", True)
    return report, timings
