"""Acceptance criteria A1 to A9, one test each."""
import random
import subprocess
import sys
from itertools import product

from slsat.contraction import (
    ContractionError, choose_locations, contract, frontier_sets, restrict, size_bound,
)
from slsat.formula import (
    Alloc, Bottom, Emp, Eq, HeapGe, HeapGeUnivMinus, Hooks, Not, PointsTo, Star, Top, UnivGe,
    Wand, exists, flatten_fo,
)
from slsat.fuzz import fuzz_compare, workers_from_env
from slsat.gen import GenConfig, random_bsr, random_sl, random_structure, random_test_combination
from slsat.parser import parse
from slsat.reductions import fo_to_sl, lambda_formula, sl_to_fo
from slsat.semantics import eval_fo, eval_sl
from slsat.solver import Status, check_finite_sat, check_infinite_sat, oracle_sat
from slsat.structures import SLStructure, corresponds, elems, enumerate_structures
from slsat.testform import conservative_maxn


def all_structures(max_size, names):
    """Every structure up to max_size with every store over ``names``."""
    for u in range(1, max_size + 1):
        for row in product(range(-1, u), repeat=u):
            heap = {a: b for a, b in enumerate(row) if b >= 0}
            for vals in product(range(u), repeat=len(names)):
                yield SLStructure.of_size(u, dict(zip(names, vals)), heap)


# -- A1 ----------------------------------------------------------------------------


def test_a1_oracle_agreement(criterion):
    cfg = GenConfig(max_quantifiers=3, max_nodes=12, max_const=2)
    report = fuzz_compare(7, 200, cfg, workers=workers_from_env())
    v = report.verdicts()
    detail = (f"{len(report.cases)} sentences, {len(report.disagreements)} disagreements "
              f"(SAT={v['SAT']} UNSAT={v['UNSAT']} UNKNOWN={v['UNKNOWN']} ERROR={v['ERROR']})")
    ok = len(report.cases) >= 200 and not report.disagreements and v["ERROR"] == 0
    criterion("A1", ok, detail)


# -- A2 ----------------------------------------------------------------------------


def test_a2_atom_equivalences(criterion):
    pto = PointsTo("x", "y")
    pto_eq = parse("x ~> y & !|h| >= 2")
    emp_eq = Not(HeapGe(1))
    checked = bad = 0
    for i in all_structures(3, ["x", "y"]):
        checked += 1
        bad += eval_sl(i, pto) != eval_sl(i, pto_eq)
        bad += eval_sl(i, Emp()) != eval_sl(i, emp_eq)
    criterion("A2", bad == 0, f"{checked} structures, {bad} exceptions")


# -- A3 ----------------------------------------------------------------------------


def heap_ge_pattern(n):
    if n == 0:
        return Top()
    return Star(heap_ge_pattern(n - 1), Not(Emp()))


def test_a3_test_atom_encodings(criterion):
    pairs = [
        (Hooks("x", "y"), Star(PointsTo("x", "y"), Top())),
        (Alloc("x"), Wand(PointsTo("x", "x"), Bottom())),
    ]
    pairs += [(HeapGe(n), heap_ge_pattern(n)) for n in range(4)]
    pairs += [(HeapGeUnivMinus(n), Wand(heap_ge_pattern(n + 1), Bottom())) for n in range(3)]
    # |U| >= n as septraction: not (true -* not |h| >= n)
    pairs += [(UnivGe(n), Not(Wand(Top(), Not(heap_ge_pattern(n))))) for n in range(4)]
    checked = bad = 0
    for i in all_structures(3, ["x", "y"]):
        for native, pattern in pairs:
            checked += 1
            bad += eval_sl(i, native) != eval_sl(i, pattern)
    criterion("A3", bad == 0, f"{checked} atom/structure pairs, {bad} exceptions")


# -- A4 ----------------------------------------------------------------------------


def test_a4_sl_to_fo(criterion):
    rng = random.Random(4)
    cfg = GenConfig(spatial=False, max_const=3, max_nodes=10)
    bad = 0
    for k in range(300):
        if k % 2:
            phi = random_bsr(rng, cfg)
            i = random_structure(rng, rng.randint(1, 4))
        else:
            phi = random_sl(rng, ["x", "y"], rng.randint(1, 10), cfg)
            i = random_structure(rng, rng.randint(1, 5), ["x", "y"])
        bad += eval_sl(i, phi) != eval_fo(corresponds(i), sl_to_fo(phi))
    criterion("A4", bad == 0, f"300 pairs, {bad} exceptions")


# -- A5 ----------------------------------------------------------------------------


def test_a5_lambda(criterion):
    checked = bad = 0
    formulas = [lambda_formula(p) for p in range(4)]
    for u in range(1, 5):
        for i in enumerate_structures(u):
            free = u - len(elems(i.h))
            for p, lam in enumerate(formulas):
                checked += 1
                bad += eval_sl(i, lam) != (free >= p)
    criterion("A5", bad == 0, f"{checked} structure/p pairs, {bad} exceptions")


# -- A6 ----------------------------------------------------------------------------


def _instance(rng):
    n, m = rng.randint(1, 2), rng.randint(1, 2)
    xs = [f"x{k + 1}" for k in range(n)]
    ys = [f"y{k + 1}" for k in range(m)]
    matrix = random_test_combination(rng, xs + ys, rng.randint(1, 8), max_const=2)
    i = random_structure(rng, rng.randint(1, 9), xs)
    return xs, ys, matrix, i


def test_a6_contraction_and_restriction(criterion):
    rng = random.Random(6)
    bound_checks = bound_violations = 0
    worst = ""

    def check_bound(i, n, xs, locs, out):
        nonlocal bound_checks, bound_violations, worst
        bound_checks += 1
        grown = out.size - len(i.universe - frontier_sets(i, xs, locs).Vbar)
        limit = size_bound(i, n, xs, locs)
        if grown > limit:
            bound_violations += 1
            worst = worst or f"{grown} > {limit} for N={n}, L={sorted(locs)}, {str(i).strip()}".replace("\n", "; ")

    # the chain 0->1->2->3 with X = {x}, L empty, N = 1
    chain = SLStructure.of_size(4, {"x": 0}, {0: 1, 1: 2, 2: 3})
    check_bound(chain, 1, ["x"], [], contract(chain, 1, ["x"], []))

    contracted = restricted = undefined = 0
    c_bad = r_bad = 0
    while contracted < 300 or restricted < 300:
        xs, ys, matrix, i = _instance(rng)
        big_n = conservative_maxn(matrix)
        dom = sorted(i.dom())
        if len(dom) < big_n:
            continue
        psi = exists(ys, matrix)
        if contracted < 300:
            locs = set(rng.sample(dom, big_n)) | {a for a in i.universe if rng.random() < 0.15}
            try:
                out = contract(i, len(ys), xs, locs)
            except ContractionError:
                undefined += 1
            else:
                contracted += 1
                check_bound(i, len(ys), xs, locs, out)
                c_bad += eval_sl(out, psi) and not eval_sl(i, psi)
        if restricted < 300:
            locs = choose_locations(i, xs, big_n)
            if locs is not None:
                restricted += 1
                r_bad += eval_sl(restrict(i, xs, locs), psi) and not eval_sl(i, psi)
    detail = (f"contraction {contracted} instances {c_bad} violations "
              f"({undefined} undefined skipped); restriction {restricted} instances {r_bad} "
              f"violations; size bound violated on {bound_violations} of {bound_checks} contractions")
    if worst:
        detail += f", e.g. {worst}"
    criterion("A6", c_bad == 0 and r_bad == 0 and bound_violations == 0, detail)


# -- A7 ----------------------------------------------------------------------------


def test_a7_concrete_facts(criterion):
    total = parse("forall y. alloc(y)")
    fin = check_finite_sat(total).status
    inf = check_infinite_sat(total).status
    fo = parse("exists x. forall y. !x = f(y) & (forall y z. f(y) = f(z) -> y = z)", "FO")
    orc = oracle_sat(fo, "FO", 5)
    ok = (fin is Status.SAT and inf is Status.UNSAT and orc.status is Status.UNKNOWN
          and orc.stats["complete_up_to"] == 5)
    criterion("A7", ok, f"forall y. alloc(y): finite {fin.value}, infinite {inf.value}; "
                        f"injective non-surjective f: {orc.status.value}, "
                        f"searched all sizes up to {orc.stats['complete_up_to']}")


# -- A8 ----------------------------------------------------------------------------

FO_CORPUS = [
    "true",
    "false",
    "forall x. f(x) = x",
    "exists x. f(x) = x",
    "exists x. !f(x) = x",
    "forall x. !f(x) = x",
    "forall x. f(f(x)) = x",
    "forall x. f(f(x)) = x & !f(x) = x",
    "exists x y. !x = y",
    "forall x y. x = y",
    "exists x y z. !x = y & !y = z & !x = z",
    "forall x y. f(x) = f(y) -> x = y",
    "forall x. exists y. f(y) = x",
    "exists x. forall y. !f(y) = x",
    "exists x. forall y. !x = f(y) & (forall y z. f(y) = f(z) -> y = z)",
    "forall x. f(x) = f(f(x))",
    "exists x. f(x) = x & forall y. f(y) = x",
    "forall x. exists y. !x = y & f(x) = y",
    "exists x y. f(x) = y & f(y) = x & !x = y",
    "forall x. f(f(f(x))) = x & !f(x) = x",
    "forall x. !f(f(x)) = x",
    "exists x. forall y. f(y) = x -> y = x",
    "forall x y. f(x) = y -> f(y) = x",
    "exists x. !f(x) = x & f(f(x)) = x",
    "forall x. exists y. f(y) = x & !y = x",
    "exists x y. !x = y & f(x) = f(y)",
    "forall x. f(x) = x | f(f(x)) = x",
    "exists x. forall y. f(y) = x",
    "forall x y z. x = y | y = z | x = z",
    "exists x y. !x = y & (forall z. z = x | z = y) & f(x) = x & f(y) = x",
]


def test_a8_finite_round_trips(criterion):
    bound = 4
    mismatches = []
    sat = 0
    for text in FO_CORPUS:
        phi = parse(text, "FO")
        psi = fo_to_sl(flatten_fo(phi), "finite")
        fo_res = oracle_sat(phi, "FO", bound)
        sl_res = oracle_sat(psi, "SL", bound)
        sat += fo_res.sat
        if fo_res.sat != sl_res.sat:
            mismatches.append(text)
        elif fo_res.sat and len(fo_res.witness.universe) != sl_res.witness.size:
            mismatches.append(text)
    detail = f"{len(FO_CORPUS)} formulae ({sat} satisfiable), {len(mismatches)} mismatches"
    if mismatches:
        detail += ": " + "; ".join(mismatches)
    criterion("A8", len(FO_CORPUS) >= 30 and not mismatches, detail)


# -- A9 ----------------------------------------------------------------------------


def _run(argv, cwd):
    proc = subprocess.run([sys.executable, "-m", "slsat", *argv], capture_output=True, cwd=cwd)
    return proc.returncode, proc.stdout, proc.stderr


def test_a9_determinism(criterion, tmp_path):
    chain = "universe 4\nstore x=0\nheap 0->1 1->2 2->3\n"
    fo_structure = "universe 2\nstore x=0\nf 0->1 1->1\npred d 1\n"
    commands = [
        ["check", "exists x. forall y. y ~> x -> alloc(y)"],
        ["check", "emp & |h| >= 1"],
        ["check", "--infinite", "!emp"],
        ["check", "--oracle-bound", "3", "forall x. exists y. x ~> y"],
        ["check", "--fo", "--oracle-bound", "3", "exists x. !f(x) = x"],
        ["translate", "--to-fo", "|h| >= |U| - 1"],
        ["translate", "--to-fo", "--format", "smtlib2", "forall y. alloc(y) -> y ~> y"],
        ["translate", "--to-fo", "--format", "tptp", "exists x. |h| >= 2 & !alloc(x)"],
        ["translate", "--from-fo-finite", "forall x. f(f(x)) = x"],
        ["translate", "--from-fo-infinite", "exists x. forall y. !f(y) = x"],
        ["modelcheck", "--formula", "x ~> x * true", "--structure", chain],
        ["modelcheck", "--fo", "--formula", "d(f(x))", "--structure", fo_structure],
        ["contract", "--structure", chain, "--vars", "x", "--bound", "1"],
        ["restrict", "--structure", chain, "--vars", "x", "--locs", "2"],
        ["fuzz", "--seed", "3", "--count", "6", "--out-dir", "fuzz"],
    ]
    differing = []
    for argv in commands:
        results = []
        for k in range(2):
            cwd = tmp_path / f"run{k}"
            cwd.mkdir(exist_ok=True)
            out = _run(argv, cwd)
            files = {p.relative_to(cwd).as_posix(): p.read_bytes()
                     for p in sorted(cwd.rglob("*")) if p.is_file()}
            results.append((out, files))
        if results[0] != results[1]:
            differing.append(argv[0])
    criterion("A9", not differing,
              f"{len(commands)} commands run twice, {len(differing)} with differing output"
              + (f": {differing}" if differing else ""))
