"""Level-by-level classification of symplectic semifield subspaces of PG(9,q).

Level 0 holds the two K-orbits of nonsingular points.  For a level-d node
with representative R and stabilizer S, the one-step extensions of R are
indexed by *labels* (the minimum point index of ``span(R, p) \\ R``), and
the S-orbits on labels are computed with a Schreier vector.  A
(d+1)-dimensional subspace W is keyed by the minimum, over its hyperplanes
U, of ``(node(U), S-orbit of g_U W)`` where ``g_U`` maps U to its node
representative.  Two subspaces are K-equivalent iff their keys agree.
"""

from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .gf import Field, make_field
from .geom import (
    SymPoint, Subspace, det_rows, rows_to_indices, span, vector_index,
)
from .group import (
    GeneratingSet, GroupElement, OrbitTable, act_subspace, all_point_rows,
    pgl4_generators, pgl4_order, point_orbits, schreier_bfs, stabilizer,
)

log = logging.getLogger(__name__)

FORMAT_NAME = "symsemi-classification"
FORMAT_VERSION = 1

# Published orbit counts per dimension, and the number of maximal orbits.
TABLE_COUNTS = {2: (2, 5, 6, 1), 3: (2, 7, 18, 2), 4: (2, 9, 31, 1), 5: (2, 13, 59, 2),
                7: (2, 16, 106, 2), 8: (2, 17, 100, 1), 9: (2, 22, 149, 2)}
TABLE_MAXIMAL = {2: (0, 1, 5, 1), 3: (0, 0, 13, 2), 4: (0, 1, 30, 1), 5: (0, 0, 49, 2),
                 7: (0, 0, 90, 2), 8: (0, 1, 99, 1), 9: (0, 0, 124, 2)}


class UnexpectedOrbitCount(RuntimeError):
    pass


class NotFound(LookupError):
    pass


class Timeout(RuntimeError):
    pass


class InvariantViolation(AssertionError):
    pass


@dataclass
class OrbitNode:
    rep: Subspace
    dim: int
    stab: GeneratingSet
    parent: Optional[int] = None
    maximal: Optional[bool] = None
    orbit_size: Optional[int] = None
    key: tuple = ()


@dataclass
class Extensions:
    """Stabilizer orbits on the one-step extensions of a node representative."""

    cand: np.ndarray         # sorted indices of points p outside R with span(R, p) semifield
    cand_label: np.ndarray   # position in ``labels`` of span(R, p) for each candidate
    labels: np.ndarray       # sorted label point indices, one per extension subspace
    orbit_of: np.ndarray     # orbit id per label position
    schreier: np.ndarray
    parent: np.ndarray
    orbit_reps: np.ndarray   # label position of each orbit representative
    orbit_sizes: np.ndarray
    gens: list

    @property
    def count(self) -> int:
        return len(self.orbit_reps)


@dataclass
class ClassificationResult:
    q: int
    levels: list[list[OrbitNode]]
    engine: Optional["Classifier"] = dc_field(default=None, repr=False)

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(lv) for lv in self.levels)

    @property
    def maximal_counts(self) -> tuple[Optional[int], ...]:
        out = []
        for lv in self.levels:
            flags = [n.maximal for n in lv]
            out.append(None if any(f is None for f in flags) else sum(bool(f) for f in flags))
        return tuple(out)

    def summary_row(self) -> str:
        return " ".join(f"d={d}:{c}" for d, c in enumerate(self.counts))

    def to_json(self) -> dict:
        return result_to_json(self)


class Classifier:
    """Classification state: point orbits, levels, extension orbit tables."""

    def __init__(self, q: int, workers: int = 1, memory_budget: int = 4 << 30, seed: int = 0,
                 check: bool = False):
        self.F: Field = make_field(q)
        self.q = q
        self.workers = max(1, int(workers))
        self.memory_budget = memory_budget
        self.seed = seed
        self.check = check
        self.K = pgl4_generators(self.F)
        self.table: Optional[OrbitTable] = None
        self.levels: list[list[OrbitNode]] = []
        self.ext: list[list[Optional[Extensions]]] = []
        self.key_to_node: list[dict] = []
        self.transfer: list[list[GroupElement]] = []
        self._cache: dict = {}
        self._coords = None
        self._nonsing = None
        self._point_node = None

    # ------------------------------------------------------------ shared data
    @property
    def coords(self) -> np.ndarray:
        if self._coords is None:
            self._coords = all_point_rows(self.q)
        return self._coords

    @property
    def nonsing(self) -> np.ndarray:
        if self._nonsing is None:
            c = self.coords
            out = np.empty(len(c), dtype=bool)
            step = 1 << 20
            for s in range(0, len(c), step):
                out[s:s + step] = det_rows(self.F, c[s:s + step]) != 0
            self._nonsing = out
        return self._nonsing

    def _map(self, fn: Callable, items: Sequence) -> list:
        if self.workers == 1 or len(items) < 2:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(self.workers) as pool:
            return list(pool.map(fn, items))

    def _rng(self, *tag: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, *tag])

    def point(self, i: int) -> SymPoint:
        return SymPoint(self.F, tuple(int(c) for c in self.coords[i]))

    # ------------------------------------------------------------ level 0
    def build_point_orbits(self) -> OrbitTable:
        if self.table is None:
            self.table = point_orbits(self.K, self.F, memory_budget=self.memory_budget)
        return self.table

    def level0(self) -> list[OrbitNode]:
        T = self.build_point_orbits()
        reps = [int(r) for r in T.reps if self.nonsing[r]]
        if len(reps) != 2:
            raise UnexpectedOrbitCount(f"q={self.q}: {len(reps)} orbits of rank-4 points, expected 2")

        def make(i_r):
            i, r = i_r
            p = self.point(r)
            S = stabilizer(T, p, self.K, self._rng(0, i))
            return OrbitNode(Subspace(self.F, (p.coords,)), 0, S, None, False, T.orbit_size(r), (i,))

        nodes = self._map(make, list(enumerate(reps)))
        self._set_level(0, nodes)
        return nodes

    def _set_level(self, d: int, nodes: list[OrbitNode]) -> None:
        del self.levels[d:], self.ext[d:], self.key_to_node[d:], self.transfer[d:]
        self._cache.clear()
        self.levels.append(nodes)
        self.ext.append([None] * len(nodes))
        self.key_to_node.append({n.key: i for i, n in enumerate(nodes)})
        if d == 0:
            pn = np.full(len(self.coords), -1, dtype=np.int8)
            for i, n in enumerate(nodes):
                pn[self.table.rep_of == n.rep.point_indices()[0]] = i
            self._point_node = pn
            self.transfer.append([GroupElement.identity(self.F) for _ in nodes])
        else:
            self.transfer.append([self._keyform_witness(n.rep).inverse() for n in nodes])

    # ------------------------------------------------------------ extensions
    def extensions_of(self, d: int, j: int) -> Extensions:
        if self.ext[d][j] is None:
            self.ext[d][j] = self._compute_extensions(self.levels[d][j], (d, j))
        return self.ext[d][j]

    def _compute_extensions(self, node: OrbitNode, tag) -> Extensions:
        F, R = self.F, node.rep
        coords, nonsing = self.coords, self.nonsing
        cand = np.setdiff1d(np.nonzero(nonsing)[0], R.point_indices())
        label = cand.copy()
        for w in R.vectors()[1:]:
            idx = rows_to_indices(F, F.vadd(coords[cand], w[None, :]))
            ok = nonsing[idx]
            cand, label = cand[ok], np.minimum(label[ok], idx[ok])
            if not cand.size:
                break
        labels, cand_label = np.unique(label, return_inverse=True)
        if cand.size and len(cand) != len(labels) * self.q ** R.rank:
            raise InvariantViolation(f"extension labels of node {tag} are inconsistent")
        perms = []
        for s in node.stab.gens:
            img = rows_to_indices(F, s.act_rows(coords[labels]))
            pos = np.searchsorted(cand, img)
            pos[pos >= len(cand)] = 0
            if not np.array_equal(cand[pos], img):
                raise InvariantViolation(f"stabilizer of node {tag} does not preserve its extensions")
            perms.append(cand_label[pos])
        rep_of, sch, parent = schreier_bfs(perms, len(labels))
        orbit_reps, orbit_sizes = np.unique(rep_of, return_counts=True)
        orbit_of = np.searchsorted(orbit_reps, rep_of)
        return Extensions(cand, cand_label, labels, orbit_of, sch, parent, orbit_reps, orbit_sizes,
                          list(node.stab.gens))

    def extension_subspaces(self, d: int, j: int) -> list[Subspace]:
        E = self.extensions_of(d, j)
        R = self.levels[d][j].rep
        return [span(self.F, [R, self.point(int(E.labels[r]))]) for r in E.orbit_reps]

    def _label_pos(self, E: Extensions, point_index: int) -> int:
        pos = int(np.searchsorted(E.cand, point_index))
        if pos >= len(E.cand) or E.cand[pos] != point_index:
            raise NotFound("subspace is not an extension of the representative")
        return int(E.cand_label[pos])

    def _ext_witness(self, E: Extensions, lab: int) -> GroupElement:
        """Element of the node stabilizer mapping extension ``lab`` to its orbit representative."""
        acc = GroupElement.identity(self.F)
        x = lab
        while E.schreier[x] >= 0:
            acc = E.gens[E.schreier[x]].inverse() * acc
            x = int(E.parent[x])
        return acc

    # ------------------------------------------------------------ canonical keys
    def _vector_index(self, v) -> int:
        return vector_index(self.F, v)

    def key_hits(self, W: Subspace):
        """Key of W plus every hyperplane attaining it, as ``(U, g_U, label)``."""
        d = W.dim
        if d < 1:
            raise ValueError("key_hits needs a subspace of dimension >= 1")
        if d == 1:
            pts = W.point_rows()
            idx = rows_to_indices(self.F, pts, normalized=True)
            nodes = self._point_node[self.table.rep_of[idx]].astype(int)
            if (nodes < 0).any():
                raise NotFound("subspace contains a singular point")
            hyps = [Subspace(self.F, (tuple(int(c) for c in r),)) for r in pts]
        else:
            hyps = W.hyperplanes()
            nodes = [self.node_of(U)[0] for U in hyps]
        m = int(min(nodes))
        E = self.extensions_of(d - 1, m)
        found = []
        for U, n in zip(hyps, nodes):
            if n != m:
                continue
            g = self.node_of(U)[1]
            v = next(r for r in W.basis if not U.contains_vector(r))
            lab = self._label_pos(E, self._vector_index(g.act_vector(v)))
            found.append((int(E.orbit_of[lab]), U, g, lab))
        omin = min(f[0] for f in found)
        return (m, omin), [(U, g, lab) for o, U, g, lab in found if o == omin]

    def _keyform_witness(self, W: Subspace) -> GroupElement:
        key, hits = self.key_hits(W)
        U, g, lab = hits[0]
        return self._ext_witness(self.extensions_of(W.dim - 1, key[0]), lab) * g

    def node_of(self, W: Subspace) -> tuple[int, GroupElement]:
        """Node index of W at its level and an element mapping W onto the node representative."""
        hit = self._cache.get(W)
        if hit is not None:
            return hit
        d = W.dim
        if d == 0:
            i = W.point_indices()[0]
            n = int(self._point_node[self.table.rep_of[i]])
            if n < 0:
                raise NotFound("point is singular")
            out = (n, self.table.witness_of(int(i)))
        else:
            key, hits = self.key_hits(W)
            n = self.key_to_node[d].get(key)
            if n is None:
                raise NotFound(f"key {key} not among the level-{d} nodes")
            U, g, lab = hits[0]
            c = self._ext_witness(self.extensions_of(d - 1, key[0]), lab) * g
            out = (n, self.transfer[d][n] * c)
        if len(self._cache) > 400_000:
            self._cache.clear()
        self._cache[W] = out
        return out

    def canonicalize(self, W: Subspace) -> tuple[tuple, GroupElement]:
        """``(orbit_key, witness)``; the witness maps W to the key-defining subspace."""
        if W.dim == 0:
            n, g = self.node_of(W)
            return (0, n), g
        key, hits = self.key_hits(W)
        U, g, lab = hits[0]
        c = self._ext_witness(self.extensions_of(W.dim - 1, key[0]), lab) * g
        return (W.dim,) + key, c

    # ------------------------------------------------------------ next level
    def _ext_orbit_stabilizer(self, d: int, m: int, o: int) -> GeneratingSet:
        node, E = self.levels[d][m], self.extensions_of(d, m)
        S = node.stab
        size = int(E.orbit_sizes[o])
        target = S.order() // size
        H = GeneratingSet(self.F)
        if target == 1:
            return H
        rng = self._rng(1, d, m, o)
        v = self.coords[E.labels[E.orbit_reps[o]]].tolist()
        while H.order() < target:
            s = S.random(rng)
            lab = self._label_pos(E, self._vector_index(s.act_vector(v)))
            h = self._ext_witness(E, lab) * s
            if not H.contains(h):
                H = H.extended(h)
        return H

    def _keyform_stabilizer(self, d: int, key: tuple, L: Subspace) -> GeneratingSet:
        """Stabilizer in K of the key-defining (d+1)-subspace L for ``key = (m, o)``."""
        m, o = key
        E = self.extensions_of(d, m)
        H = self._ext_orbit_stabilizer(d, m, o)
        _, hits = self.key_hits(L)
        for U, g, lab in hits:
            c = self._ext_witness(E, lab) * g
            if not H.contains(c):
                H = H.extended(c)
        return H

    def next_level(self, d: int) -> list[OrbitNode]:
        """Classify (d+1)-dimensional subspaces from the level-d nodes."""
        F = self.F
        exts = self._map(lambda j: self.extensions_of(d, j), list(range(len(self.levels[d]))))
        cands = []
        for j, E in enumerate(exts):
            self.levels[d][j].maximal = E.count == 0
            R = self.levels[d][j].rep
            for o, r in enumerate(E.orbit_reps):
                cands.append(((j, o), span(F, [R, self.point(int(E.labels[r]))])))
        log.info("q=%d d=%d: %d candidates", self.q, d + 1, len(cands))
        keys = self._map(lambda c: self.key_hits(c[1])[0], cands)
        groups: dict[tuple, list[Subspace]] = {}
        keyform: dict[tuple, Subspace] = {}
        for (src, L), k in zip(cands, keys):
            groups.setdefault(k, []).append(L)
            if src == k:
                keyform[k] = L
        if set(keyform) != set(groups):
            raise InvariantViolation("a key group lacks its key-defining candidate")

        def make(k):
            L = keyform[k]
            H = self._keyform_stabilizer(d, k, L)
            rep = min(groups[k], key=Subspace.encoding)
            t = self._keyform_witness(rep).inverse()
            S = H.conjugated(t)
            order = H.order()
            S.claimed_order = order
            return OrbitNode(rep, d + 1, S, k[0], None, pgl4_order(self.q) // order, k)

        nodes = self._map(make, sorted(groups))
        nodes.sort(key=lambda n: n.rep.encoding())
        if self.check:
            for n in nodes:
                for g in n.stab.gens:
                    if act_subspace(g, n.rep) != n.rep:
                        raise InvariantViolation("stabilizer generator moves its representative")
        self._set_level(d + 1, nodes)
        return nodes

    def finish_level(self, d: int) -> None:
        """Set maximal flags of the top level by attempting extension."""
        for j, node in enumerate(self.levels[d]):
            E = self.extensions_of(d, j)
            if d == 3:
                if E.count:
                    raise InvariantViolation("a semifield solid admits an extension")
                node.maximal = True
            else:
                node.maximal = E.count == 0

    def result(self) -> ClassificationResult:
        return ClassificationResult(self.q, self.levels, self)

    # ------------------------------------------------------------ restore
    def restore(self, levels: list[list[OrbitNode]]) -> None:
        self.build_point_orbits()
        for d, nodes in enumerate(levels):
            self._set_level(d, nodes)


# ---------------------------------------------------------------- pipeline

def classify(q: int, max_dim: int = 3, memory_budget: int = 4 << 30, workers: int = 1,
             checkpoint: Optional[str | Path] = None, timeout: Optional[float] = None,
             seed: int = 0, check: bool = False) -> ClassificationResult:
    if not 0 <= max_dim <= 3:
        raise ValueError("max_dim must lie in [0, 3]")
    t0 = time.monotonic()
    eng = Classifier(q, workers=workers, memory_budget=memory_budget, seed=seed, check=check)
    start = 0
    if checkpoint is not None and Path(checkpoint).exists():
        saved = load_result(checkpoint)
        if saved.q != q:
            raise ValueError(f"checkpoint {checkpoint} is for q={saved.q}, not q={q}")
        eng.restore(saved.levels[:max_dim + 1])
        start = len(eng.levels) - 1
        log.info("resumed q=%d from %s at level %d", q, checkpoint, start)
    else:
        eng.build_point_orbits()
        eng.level0()
        _save(eng, checkpoint)
    for d in range(start, max_dim):
        if timeout is not None and time.monotonic() - t0 > timeout:
            _save(eng, checkpoint)
            raise Timeout(f"classification of q={q} timed out after level {d}")
        eng.next_level(d)
        _save(eng, checkpoint)
    if max_dim == 3:
        eng.finish_level(3)
    _save(eng, checkpoint)
    return eng.result()


def _save(eng: Classifier, path) -> None:
    if path is not None:
        save_result(eng.result(), path)


def level0(T: OrbitTable, engine: Optional[Classifier] = None) -> list[OrbitNode]:
    eng = engine or Classifier(T.q)
    eng.table = T
    return eng.level0()


def extensions(node: OrbitNode, engine: Classifier) -> list[Subspace]:
    """One representative per stabilizer orbit of one-step extensions, sorted by encoding."""
    d = node.dim
    j = next(i for i, n in enumerate(engine.levels[d]) if n.rep == node.rep)
    return sorted(engine.extension_subspaces(d, j), key=Subspace.encoding)


def canonicalize(W: Subspace, engine: Classifier) -> tuple[tuple, GroupElement]:
    return engine.canonicalize(W)


def reject_isomorphs(cands: Iterable[Subspace], engine: Classifier) -> list[Subspace]:
    """Encoding-minimal member of each K-orbit met by ``cands``."""
    best: dict[tuple, Subspace] = {}
    for W in cands:
        k = engine.canonicalize(W)[0]
        if k not in best or W.encoding() < best[k].encoding():
            best[k] = W
    return sorted(best.values(), key=Subspace.encoding)


# ---------------------------------------------------------------- result files

def _gen_codes(g: GroupElement) -> str:
    return " ".join(g.field.render(x) for x in g.codes())


def result_to_json(res: ClassificationResult) -> dict:
    F = make_field(res.q)
    levels = []
    for lv in res.levels:
        recs = []
        for n in lv:
            recs.append({
                "dim": n.dim,
                "basis": [" ".join(F.render(c) for c in r) for r in n.rep.basis],
                "stabilizer": [_gen_codes(g) for g in n.stab.gens],
                "stabilizer_order": n.stab.claimed_order,
                "orbit_size": n.orbit_size,
                "maximal": n.maximal,
                "parent": n.parent,
                "key": list(n.key),
            })
        levels.append(recs)
    return {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "q": res.q,
        "minpoly": F.poly_str(),
        "counts": list(res.counts),
        "maximal_counts": list(res.maximal_counts),
        "levels": levels,
    }


def dumps_result(res: ClassificationResult) -> str:
    return json.dumps(result_to_json(res), indent=1) + "\n"


def save_result(res: ClassificationResult, path) -> None:
    p = Path(path)
    tmp = p.with_name(p.name + ".tmp")
    tmp.write_text(dumps_result(res))
    tmp.replace(p)


def result_from_json(doc: dict) -> ClassificationResult:
    if doc.get("format") != FORMAT_NAME:
        raise ValueError("not a classification result document")
    if doc.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported result version {doc.get('version')}")
    q = int(doc["q"])
    F = make_field(q)
    levels = []
    for lv in doc["levels"]:
        nodes = []
        for r in lv:
            basis = tuple(tuple(F.parse(t) for t in row.split()) for row in r["basis"])
            gens = []
            for s in r["stabilizer"]:
                c = [F.parse(t) for t in s.split()]
                gens.append(GroupElement(F, [c[4 * i:4 * i + 4] for i in range(4)], normalized=True))
            S = GeneratingSet(F, gens, r.get("stabilizer_order"))
            nodes.append(OrbitNode(Subspace(F, basis), int(r["dim"]), S, r.get("parent"),
                                   r.get("maximal"), r.get("orbit_size"), tuple(r.get("key", ()))))
        levels.append(nodes)
    return ClassificationResult(q, levels)


def load_result(path) -> ClassificationResult:
    return result_from_json(json.loads(Path(path).read_text()))


def engine_for(res: ClassificationResult, workers: int = 1, memory_budget: int = 4 << 30) -> Classifier:
    """Rebuild the lookup state of a saved result (point orbits, extension tables)."""
    if res.engine is not None:
        return res.engine
    eng = Classifier(res.q, workers=workers, memory_budget=memory_budget)
    eng.restore(res.levels)
    res.engine = eng
    return eng
