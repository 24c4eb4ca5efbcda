"""Write the ramification tables from their closed-form rows.

Run from the repository root: python3 golden/generate.py
"""
import json
from pathlib import Path

MAX_GAMMA = 60
OUT = Path(__file__).parent


def row(kind, gamma, order, m):
    return {"kind": kind, "gamma": gamma, "order": order, "m": sorted(m)}


def rows_for(table, g):
    n = g + 1
    if table == 4:
        return [row("cyclic", g, 2 * n, [n])]
    if table == 5:
        return [row("cyclic", g, n, [n, n])]
    if table == 6:
        out = []
        if g % 2 == 1 and g > 1:
            out.append(row("cyclic", g, n, [2, 2, n // 2]))
        sporadic = {11: 3, 23: 4, 59: 5}
        if g in sporadic:
            out.append(row("cyclic", g, n, [2, 3, sporadic[g]]))
        return out
    if table == 7:
        out = [row("swap", g, 2 * n, [2 * n, 2 * n]), row("swap", g, 2 * n, [2, 2, n])]
        sporadic = {5: 3, 11: 4, 29: 5}
        if g in sporadic:
            out.append(row("swap", g, 2 * n, [2, 3, sporadic[g]]))
        return out
    if table == 8:
        return [row("no_swap", g, 2 * n, [n])]
    raise ValueError(table)


TITLES = {
    4: "cyclic, t = 1",
    5: "cyclic, t = 2",
    6: "cyclic, t = 3",
    7: "full group, ends exchanged",
    8: "full group, ends fixed",
}

for t, title in TITLES.items():
    rows = []
    for g in range(1, MAX_GAMMA + 1):
        rows.extend(sorted(rows_for(t, g), key=lambda r: r["m"]))
    doc = {"table": t, "title": title, "rows": rows}
    (OUT / f"table{t}.json").write_text(json.dumps(doc, indent=1) + "\n")
