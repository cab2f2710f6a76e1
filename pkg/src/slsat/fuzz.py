"""Differential testing of the finite checker against the bounded oracle."""
from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .formula import bsr_shape
from .gen import GenConfig, random_bsr
from .solver import Status, check_finite_sat, check_witness, oracle_sat, small_model_bound

WORKERS_ENV = "SLSAT_WORKERS"
SOLVER_WORK = 2_000_000
ORACLE_WORK = 200_000


@dataclass(frozen=True)
class FuzzCase:
    index: int
    formula: str
    n: int
    m: int
    bound: int
    verdict: str
    size: int | None
    solver_work: int
    oracle: str
    oracle_size: int | None
    oracle_complete: int
    oracle_work: int
    problem: str

    @property
    def ok(self) -> bool:
        return not self.problem


@dataclass(frozen=True)
class FuzzReport:
    seed: int
    cases: tuple[FuzzCase, ...]

    @property
    def disagreements(self) -> list[FuzzCase]:
        return [c for c in self.cases if not c.ok]

    def verdicts(self) -> dict[str, int]:
        out = {s.value: 0 for s in Status}
        out["ERROR"] = 0
        for c in self.cases:
            out[c.verdict] += 1
        return out

    def to_tsv(self) -> str:
        cols = ["index", "n", "m", "bound", "verdict", "size", "solver_work",
                "oracle", "oracle_size", "oracle_complete", "oracle_work", "problem", "formula"]
        lines = ["\t".join(cols)]
        for c in self.cases:
            row = [getattr(c, k) for k in cols]
            lines.append("\t".join("" if v is None else str(v) for v in row))
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        v = self.verdicts()
        work = sum(c.solver_work for c in self.cases)
        lines = [
            f"seed {self.seed}",
            f"cases {len(self.cases)}",
            "verdicts " + " ".join(f"{k}={v[k]}" for k in sorted(v)),
            f"solver_work {work}",
            f"oracle_work {sum(c.oracle_work for c in self.cases)}",
            f"disagreements {len(self.disagreements)}",
        ]
        for c in self.disagreements:
            lines.append(f"  case {c.index}: {c.problem}: {c.formula}")
        return "\n".join(lines) + "\n"


def _case(args) -> FuzzCase:
    seed, index, cfg, solver_work, oracle_work = args
    rng = random.Random(f"{seed}/{index}")
    phi = random_bsr(rng, cfg)
    n, m = bsr_shape(phi)
    bound = small_model_bound(phi)
    problem = ""
    try:
        res = check_finite_sat(phi, max_work=solver_work)
    except AssertionError as e:
        res = None
        problem = f"solver assertion: {e}"
    orc = oracle_sat(phi, "SL", bound + 2, max_work=oracle_work)
    size = res.witness.size if res is not None and res.sat else None
    osize = orc.witness.size if orc.sat else None
    complete = int(orc.stats.get("complete_up_to", orc.stats.get("universe", 1) - 1))
    if res is not None and not problem:
        if res.sat:
            try:
                check_witness(phi, res.witness)
            except AssertionError:
                problem = "witness rejected"
            if orc.sat and osize != size:
                problem = f"least model size {size} but oracle found {osize}"
            elif not orc.sat and complete >= size:
                problem = f"oracle finds no model up to {complete} but solver has one of size {size}"
        elif res.status is Status.UNSAT and orc.sat:
            problem = f"solver says UNSAT, oracle has a model of size {osize}"
    return FuzzCase(
        index=index, formula=str(phi), n=n, m=m, bound=bound,
        verdict=res.status.value if res is not None else "ERROR", size=size,
        solver_work=int(res.stats.get("visited", 0)) if res is not None else 0,
        oracle=orc.status.value, oracle_size=osize, oracle_complete=complete,
        oracle_work=int(orc.stats.get("visited", 0)), problem=problem)


def workers_from_env(default: int = 1) -> int:
    raw = os.environ.get(WORKERS_ENV, "")
    try:
        return max(1, int(raw)) if raw else default
    except ValueError:
        return default


def fuzz_compare(seed: int, count: int, cfg: GenConfig = GenConfig(), *,
                 solver_work: int = SOLVER_WORK, oracle_work: int = ORACLE_WORK,
                 workers: int | None = None) -> FuzzReport:
    """Generate ``count`` sentences from ``seed`` and compare verdicts.

    Work limits are counted in evaluation steps, not seconds, so the
    report depends only on the arguments.
    """
    jobs: Sequence = [(seed, i, cfg, solver_work, oracle_work) for i in range(count)]
    workers = workers_from_env() if workers is None else workers
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cases = list(pool.map(_case, jobs, chunksize=4))
    else:
        cases = [_case(j) for j in jobs]
    return FuzzReport(seed, tuple(cases))
