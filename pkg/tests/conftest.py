import csv
import itertools
import json
from pathlib import Path

import pytest

from plrcount.core import Shape, TriPoly

FIXTURES = Path(__file__).parent / "fixtures"


def load_weight_fixture():
    """{(r,s,n): {m-or-'total': count}} from the golden weight tables."""
    out: dict[tuple[int, int, int], dict] = {}
    with open(FIXTURES / "plr_weight_tables.csv") as fh:
        for row in csv.DictReader(filter(lambda l: not l.startswith("#"), fh)):
            key = (int(row["r"]), int(row["s"]), int(row["n"]))
            m = row["m"] if row["m"] == "total" else int(row["m"])
            out.setdefault(key, {})[m] = int(row["count"])
    return out


def load_class_fixture():
    """{(kind, r, s, n): {m-or-'total': count}}."""
    out: dict[tuple, dict] = {}
    with open(FIXTURES / "class_counts.csv") as fh:
        for row in csv.DictReader(filter(lambda l: not l.startswith("#"), fh)):
            key = (row["kind"], int(row["r"]), int(row["s"]), int(row["n"]))
            m = row["m"] if row["m"] == "total" else int(row["m"])
            out.setdefault(key, {})[m] = int(row["count"])
    return out


def load_unbounded_fixture():
    """[(m, isotopism, main)] for m = 0..11."""
    rows = []
    with open(FIXTURES / "unbounded_classes.csv") as fh:
        for row in csv.DictReader(filter(lambda l: not l.startswith("#"), fh)):
            rows.append((int(row["m"]), int(row["isotopism"]), int(row["main"])))
    return rows


def load_blocks_fixture():
    """[(matrix_str, aut, chromatic coeffs)] for the 16 published blocks."""
    rows = []
    with open(FIXTURES / "blocks_table.csv") as fh:
        for row in csv.DictReader(filter(lambda l: not l.startswith("#"), fh)):
            coeffs = tuple(int(x) for x in row["chromatic"].split(","))
            rows.append((row["matrix"], int(row["aut"]), coeffs))
    return rows


def load_pg_fixture():
    """[(name, v, e, c, aut, TriPoly)] for the published P(G) tables."""
    base: dict[str, TriPoly] = {}

    def B(a, b, c):
        return TriPoly.bar(a, b, c)

    env = {"B": B, "RSN": TriPoly.rsn(), "__builtins__": {}}
    rows = []
    with open(FIXTURES / "pg_tables.csv") as fh:
        for row in csv.DictReader(filter(lambda l: not l.startswith("#"), fh)):
            expr = row["expr"].replace(";", ",")
            poly = eval(expr, env, base)  # noqa: S307 - fixture-controlled input
            if isinstance(poly, int):
                poly = TriPoly.constant(poly)
            base.setdefault(row["name"], poly)
            rows.append(
                (
                    row["name"],
                    int(row["v"]),
                    int(row["e"]),
                    int(row["c"]),
                    int(row["aut"]),
                    poly,
                )
            )
    return rows


def load_theorem9_blocks():
    with open(FIXTURES / "theorem9_blocks.json") as fh:
        data = json.load(fh)
    blocks = {}
    for v, terms in data["blocks"].items():
        blocks[int(v)] = {
            tuple(int(x) for x in key.split(",")): coeff
            for key, coeff in terms.items()
        }
    return blocks


def naive_count_all(shape: Shape) -> list[int]:
    """Independent oracle: generate every grid over symbols {0..n} and filter
    by the row/column uniqueness rules."""
    counts = [0] * (shape.cells + 1)
    for grid in itertools.product(range(shape.n + 1), repeat=shape.cells):
        rows = [grid[i * shape.s : (i + 1) * shape.s] for i in range(shape.r)]
        ok = True
        for row in rows:
            filled = [v for v in row if v]
            if len(set(filled)) != len(filled):
                ok = False
                break
        if ok:
            for j in range(shape.s):
                col = [rows[i][j] for i in range(shape.r) if rows[i][j]]
                if len(set(col)) != len(col):
                    ok = False
                    break
        if ok:
            counts[sum(1 for v in grid if v)] += 1
    return counts


@pytest.fixture(scope="session")
def weight_fixture():
    return load_weight_fixture()


@pytest.fixture(scope="session")
def class_fixture():
    return load_class_fixture()


@pytest.fixture(scope="session")
def unbounded_fixture():
    return load_unbounded_fixture()
