#!/usr/bin/env python3
"""Regenerates the hand-built p-document fixtures (run from this directory)."""
import json

def N(id, label, *kids):
    return {"id": id, "label": label, "children": list(kids)}

def ind(id, *pairs):
    return {"dist": "ind", "id": id, "children": [{"p": p, "node": n} for p, n in pairs]}

def mux(id, *pairs):
    return {"dist": "mux", "id": id, "children": [{"p": p, "node": n} for p, n in pairs]}

def write(name, root):
    with open(name + ".json", "w") as f:
        json.dump({"name": name, "root": root}, f, indent=1)
        f.write("\n")

def views(name, defs):
    with open(name + ".json", "w") as f:
        json.dump([{"name": n, "query": q} for n, q in defs], f, indent=1)
        f.write("\n")

# Dependent pair v = a[.//c]/b, q = a/b[c]: equal extensions, different answers.
b_c = lambda: N("n1", "b", ind("x1", ("1/2", N("n2", "c"))))
write("dep_p1", N("n0", "a", b_c(), ind("x2", ("1/2", N("n3", "c")))))
write("dep_p2", N("n0", "a", ind("x2", ("3/4", b_c())), N("n3", "c")))
views("dep_views", [("v", "a[.//c]/b")])

# Prefix-suffix case: chain a/b/c/b[e]/c/(b[e]/c/b/c/d); upper e prob E1, presence of the
# lower b pres, lower e E2. v selects the last two c nodes with pres*E1, pres*E2.
def psfx(E1, pres, E2):
    tail = N("n6", "c", N("n7", "b", N("n8", "c", N("n9", "d"))))
    lower = N("n5", "b", ind("x5", (E2, N("n5e", "e"))), tail)
    return N("n0", "a", N("n1", "b", N("n2", "c",
             N("n3", "b", ind("x3", (E1, N("n3e", "e"))),
               N("n4", "c", ind("x4", (pres, lower)))))))
write("psfx_p1", psfx("0.3", "0.4", "0.6"))
write("psfx_p2", psfx("0.4", "0.3", "0.8"))
views("psfx_views", [("v", "a//b[e]/c/b/c")])

# Four views over a[1]/b[2]/c[3]/d: one optional predicate per level plus an optional d.
write("levels", N("n0", "a", ind("x0", ("1/2", N("n0p", "1"))),
      N("n1", "b", ind("x1", ("1/3", N("n1p", "2"))),
        N("n2", "c", ind("x2", ("1/4", N("n2p", "3"))), ind("x3", ("4/5", N("n3", "d")))))))
views("levels_views", [("v1", "a[1]/b/c[3]/d"), ("v2", "a/b[2]/c[3]/d"),
                     ("v3", "a[1]/b[2]/c/d"), ("v4", "a//d")])

# Nested occurrences for the prefix-suffix case: v = a//b/c/b/c selects c2 and c3.
write("chain_bcbc", N("n0", "a", N("b1", "b", ind("x1", ("1/2", N("c1", "c",
      N("b2", "b", mux("x2", ("2/3", N("c2", "c",
        ind("x3", ("3/5", N("b3", "b", N("c3", "c", ind("x4", ("3/4", N("d", "d"))))))),
        N("d2", "d"))),
        ("1/4", N("c2x", "c", N("dx", "d")))))))))))
views("chain_views", [("v", "a//b/c/b/c")])

# Hypergraph-matching reduction: q = a[1]/.../a[6]//b, one view per hyperedge,
# plus a predicate-free view for appearance probabilities.
def chain(i):
    if i > 6:
        return N("n7", "c", ind("x7", ("3/4", N("nb", "b"))))
    return N("n%d" % i, "a", ind("p%d" % i, ("1/%d" % (i + 1), N("n%dp" % i, str(i)))), chain(i + 1))
write("hyper", chain(1))

def edge_view(edge):
    return "/".join("a[%d]" % i if i in edge else "a" for i in range(1, 7)) + "//b"
def hyper_views(name, edges):
    defs = [("e%s" % "".join(map(str, e)), edge_view(e)) for e in edges]
    views(name, defs + [("app", edge_view(()))])
hyper_views("hyper_match_views", [(1, 2, 3), (4, 5, 6), (1, 4, 5), (2, 3, 6)])
hyper_views("hyper_nomatch_views", [(1, 2, 3), (3, 4, 5), (1, 5, 6), (2, 4, 6)])
