"""
Survey of operator orderings: negativity curves for many orderings at once,
grouped into behaviour classes.

Evaluating every ordering with :func:`~fermiorder.entanglement.negativity_curve`
would rebuild the state each time.  The survey instead builds the joint state
once per grid point in the canonical ordering and works with signs:

* Re-expressing a key in another ordering multiplies it by ``(-1)^n`` where
  ``n`` counts occupied mode pairs that the new ordering inverts.  For a batch
  of orderings this is one matrix product of pair-inversion indicators with
  pair occupations.
* The partially transposed reduced matrix is a sum of terms
  ``s_x s_y psi_x psi_y^*`` over keys ``x, y`` that share their region-II bits.
  Its sparsity pattern does not depend on the signs, so it splits into fixed
  blocks, and the negativity is the sum of the blocks' negativities.
* Conjugating a block by a diagonal ``±1`` matrix leaves its spectrum alone.
  Fixing that freedom on a spanning tree gives a canonical sign pattern per
  block.  Block curves are cached under that pattern, so only distinct blocks
  ever reach the eigensolver.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy import sparse

from .entanglement import NEG_TOL, NegativityCurve
from .errors import DomainError, EnumerationRefused
from .fock_algebra import ALICE, ModeOrdering
from .rindler_states import FieldSpec, JointStateSpec, UnruhWeights, build_joint_state, check_squeeze

log = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 33
DEFAULT_QUANTUM = 1e-9
DEFAULT_MC_SAMPLES = 200_000
MAX_ENUMERATED_MODES = 12
CHUNK = 2048
_EIG_BATCH = 2048


def classification_grid(points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    if points < 2:
        raise DomainError("a classification grid needs at least two points")
    return np.linspace(0.0, math.pi / 4, points)


@dataclass(frozen=True)
class OrderingPermutation:
    """Rob's modes in a new order, as indices into ``field.rob_modes``."""

    perm: tuple[int, ...]

    def ordering(self, field: FieldSpec) -> ModeOrdering:
        modes = field.rob_modes
        if sorted(self.perm) != list(range(len(modes))):
            raise DomainError(f"{self.perm} is not a permutation of {len(modes)} modes")
        return ModeOrdering((ALICE,) + tuple(modes[k] for k in self.perm))

    def labels(self, field: FieldSpec) -> list[str]:
        return [field.rob_modes[k].label for k in self.perm]

    @classmethod
    def from_ordering(cls, ordering: ModeOrdering, field: FieldSpec) -> "OrderingPermutation":
        index = {m: k for k, m in enumerate(field.rob_modes)}
        rest = [m for m in ordering if m != ALICE]
        if len(rest) != len(index) or set(rest) != set(index):
            raise DomainError("ordering does not contain exactly the field's Rob modes")
        return cls(tuple(index[m] for m in rest))

    def is_physical(self, field: FieldSpec) -> bool:
        regions = [field.rob_modes[k].region for k in self.perm]
        return "I" not in regions[regions.index("II"):]


def physical_permutation(field: FieldSpec) -> OrderingPermutation:
    """Region I modes in canonical relative order, then region II modes."""
    modes = field.rob_modes
    first = [k for k, m in enumerate(modes) if m.region == "I"]
    second = [k for k, m in enumerate(modes) if m.region == "II"]
    return OrderingPermutation(tuple(first + second))


def enumerate_orderings(field: FieldSpec) -> Iterator[OrderingPermutation]:
    """All orderings of Rob's modes in lexicographic order."""
    m = len(field.rob_modes)
    if m > MAX_ENUMERATED_MODES:
        raise EnumerationRefused(
            f"{m} modes give {math.factorial(m):.3g} orderings; sample them instead (mc-survey)"
        )
    for perm in itertools.permutations(range(m)):
        yield OrderingPermutation(perm)


@dataclass(frozen=True)
class CurveFingerprint:
    quantized: tuple[int, ...]
    quantum: float


def fingerprint_curve(curve: NegativityCurve | np.ndarray, quantum: float = DEFAULT_QUANTUM) -> CurveFingerprint:
    if quantum <= 0:
        raise DomainError("quantum must be positive")
    values = curve.values if isinstance(curve, NegativityCurve) else np.asarray(curve, dtype=float)
    return CurveFingerprint(tuple(int(v) for v in np.rint(values / quantum)), quantum)


@dataclass
class BehaviorClass:
    fingerprint: CurveFingerprint
    representative: OrderingPermutation
    population: int
    contains_physical: bool
    curve: np.ndarray

    @property
    def endpoint(self) -> float:
        return float(self.curve[-1])


@dataclass
class SurveyReport:
    field: FieldSpec
    spec: JointStateSpec
    grid: np.ndarray
    quantum: float
    mode: str
    classes: list[BehaviorClass]
    orderings_examined: int
    sample_size: int | None = None
    rng_seed: int | None = None

    @property
    def weights(self) -> UnruhWeights:
        return self.spec.weights

    def physical(self) -> BehaviorClass:
        return physical_class(self, self.field)

    def to_dict(self) -> dict:
        """Plain-JSON form (complex numbers as ``[re, im]``)."""
        def num(z):
            z = complex(z)
            return z.real if z.imag == 0 else [z.real, z.imag]

        def poly(p):
            return [
                {"coef": num(c), "spins": [None if s is None else str(s) for s in sig]}
                for c, sig in p
            ]

        return {
            "field": self.field.name,
            "state": {
                "name": self.spec.name,
                "P": num(self.spec.p),
                "Q": num(self.spec.q),
                "A": poly(self.spec.branch_a),
                "B": poly(self.spec.branch_b),
            },
            "qr": num(self.weights.q_r),
            "ql": num(self.weights.q_l),
            "grid": [float(r) for r in self.grid],
            "quantum": self.quantum,
            "mode": self.mode,
            "seed": self.rng_seed,
            "sample_size": self.sample_size,
            "orderings_examined": self.orderings_examined,
            "n_classes": len(self.classes),
            "classes": [
                {
                    "population": c.population,
                    "is_physical": c.contains_physical,
                    "curve": [float(v) for v in c.curve],
                    "representative": c.representative.labels(self.field),
                }
                for c in self.classes
            ],
        }


# --- the vectorised kernel ---------------------------------------------------


@dataclass
class _Block:
    size: int
    term_x: np.ndarray
    term_y: np.ndarray
    term_u: np.ndarray
    term_v: np.ndarray
    tree: list[tuple[int, int, int, int]]  # child, parent, key x, key y
    free_terms: np.ndarray  # term indices not fixed by the tree
    diag_index: np.ndarray
    diag_values: np.ndarray  # (G, len(diag_index))
    term_values: np.ndarray  # (G, T)
    cache: dict = field(default_factory=dict)
    table: list = field(default_factory=list)


class SurveyKernel:
    """Precomputed sign and block structure for one state on one grid."""

    def __init__(self, spec: JointStateSpec, field: FieldSpec, grid: Sequence[float]):
        self.spec = spec
        self.field = field
        self.grid = np.array([check_squeeze(r) for r in grid])
        if np.any(np.diff(self.grid) <= 0):
            raise DomainError("grid must be strictly increasing")
        rob = field.rob_modes
        m = len(rob)
        self.n_modes = m
        states = [build_joint_state(spec, field, r) for r in self.grid]
        keys = sorted(set().union(*(s.terms for s in states)))
        amps = np.array([[s.terms.get(k, 0) for k in keys] for s in states], dtype=complex)
        self.real = bool(np.all(amps.imag == 0))
        if self.real:
            amps = amps.real
        total = m + 1
        karr = np.array(keys, dtype=np.int64)
        occ = (karr[:, None] >> (total - 1 - np.arange(total))) & 1
        alice = occ[:, 0]
        rob_occ = occ[:, 1:].astype(np.uint8)
        iu, ju = np.triu_indices(m, 1)
        self._pair_i, self._pair_j = iu, ju
        self._opair = (rob_occ[:, iu] & rob_occ[:, ju]).T.astype(np.float32)  # (P, K)
        region_one = [k for k, mode in enumerate(rob) if mode.region == "I"]
        region_two = [k for k, mode in enumerate(rob) if mode.region == "II"]
        self._region_one = np.array(region_one)
        self._region_two = np.array(region_two)
        weights_one = 1 << np.arange(len(region_one))[::-1]
        weights_two = 1 << np.arange(len(region_two))[::-1]
        ibits = rob_occ[:, region_one].astype(np.int64) @ weights_one
        kbits = rob_occ[:, region_two].astype(np.int64) @ weights_two
        self.n_keys = len(keys)
        self._build_blocks(alice, ibits, kbits, amps)

    def _build_blocks(self, alice, ibits, kbits, amps):
        groups: dict[int, list[int]] = {}
        for x, k in enumerate(kbits):
            groups.setdefault(int(k), []).append(x)
        node_ids: dict[tuple[int, int], int] = {}

        def node(a, i):
            return node_ids.setdefault((int(a), int(i)), len(node_ids))

        diag = [(node(alice[x], ibits[x]), x) for x in range(len(alice))]
        terms = []
        for members in groups.values():
            for x in members:
                for y in members:
                    if x == y:
                        continue
                    # rho[(a_x,i_x),(a_y,i_y)] lands at PT position ((a_y,i_x),(a_x,i_y))
                    u, v = node(alice[y], ibits[x]), node(alice[x], ibits[y])
                    if u < v:
                        terms.append((u, v, x, y))
        n_nodes = len(node_ids)
        parent = list(range(n_nodes))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for u, v, _, _ in terms:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)
        members: dict[int, list[int]] = {}
        for n in range(n_nodes):
            members.setdefault(find(n), []).append(n)
        by_block: dict[int, list] = {}
        for t in terms:
            by_block.setdefault(find(t[0]), []).append(t)
        diag_by_block: dict[int, list] = {}
        for n, x in diag:
            diag_by_block.setdefault(find(n), []).append((n, x))

        self.blocks: list[_Block] = []
        for root in sorted(by_block):
            nodes = members[root]
            local = {n: j for j, n in enumerate(nodes)}
            tl = sorted(by_block[root], key=lambda t: (local[t[0]], local[t[1]], t[2], t[3]))
            tx = np.array([t[2] for t in tl])
            ty = np.array([t[3] for t in tl])
            tu = np.array([local[t[0]] for t in tl])
            tv = np.array([local[t[1]] for t in tl])
            adjacency: dict[int, list[tuple[int, int]]] = {}
            for idx, (u, v) in enumerate(zip(tu, tv)):
                adjacency.setdefault(int(u), []).append((int(v), idx))
                adjacency.setdefault(int(v), []).append((int(u), idx))
            seen = {0}
            tree = []
            tree_terms = set()
            queue = deque([0])
            while queue:
                u = queue.popleft()
                for w, idx in sorted(adjacency.get(u, ())):
                    if w not in seen:
                        seen.add(w)
                        tree.append((w, u, int(tx[idx]), int(ty[idx])))
                        tree_terms.add(idx)
                        queue.append(w)
            free = np.array([i for i in range(len(tl)) if i not in tree_terms], dtype=np.int64)
            dn = [(local[n], x) for n, x in diag_by_block.get(root, ())]
            self.blocks.append(
                _Block(
                    size=len(nodes),
                    term_x=tx,
                    term_y=ty,
                    term_u=tu,
                    term_v=tv,
                    tree=tree,
                    free_terms=free,
                    diag_index=np.array([d[0] for d in dn], dtype=np.int64),
                    diag_values=np.abs(amps[:, [d[1] for d in dn]]) ** 2,
                    term_values=amps[:, tx] * np.conj(amps[:, ty]),
                )
            )
        log.debug(
            "kernel: %d keys, %d PT nodes, blocks %s",
            len(alice), n_nodes, sorted((b.size for b in self.blocks), reverse=True),
        )

    # -- signs ---------------------------------------------------------------

    def parities(self, perms: np.ndarray) -> np.ndarray:
        """Sign bits (0 for +, 1 for -) of every key under each ordering; (C, K)."""
        tpos = np.argsort(perms, axis=1)
        inv = (tpos[:, self._pair_i] > tpos[:, self._pair_j]).astype(np.float32)
        counts = inv @ self._opair
        return (np.rint(counts).astype(np.int64) & 1).astype(np.uint8)

    def is_physical(self, perms: np.ndarray) -> np.ndarray:
        tpos = np.argsort(perms, axis=1)
        return tpos[:, self._region_one].max(axis=1) < tpos[:, self._region_two].min(axis=1)

    # -- curves ----------------------------------------------------------------

    def _canonical(self, block: _Block, par: np.ndarray) -> np.ndarray:
        gauge = np.zeros((par.shape[0], block.size), dtype=np.uint8)
        for child, parent_node, x, y in block.tree:
            gauge[:, child] = gauge[:, parent_node] ^ par[:, x] ^ par[:, y]
        f = block.free_terms
        return (
            par[:, block.term_x[f]]
            ^ par[:, block.term_y[f]]
            ^ gauge[:, block.term_u[f]]
            ^ gauge[:, block.term_v[f]]
        )

    def _block_curves(self, block: _Block, signs: np.ndarray) -> np.ndarray:
        """Negativity curves (N, G) of a block for canonical sign rows (N, free)."""
        n, t = block.size, len(block.term_x)
        full = np.ones((signs.shape[0], t))
        full[:, block.free_terms] = 1.0 - 2.0 * signs
        dtype = float if self.real else complex
        # several terms can land on the same entry, hence a summing scatter
        scatter = sparse.csr_matrix(
            (np.ones(t), (block.term_u * n + block.term_v, np.arange(t))), shape=(n * n, t)
        )
        eye = np.arange(n)
        out = np.zeros((signs.shape[0], len(self.grid)))
        for g in range(len(self.grid)):
            diag = np.zeros(n)
            np.add.at(diag, block.diag_index, block.diag_values[g])
            for lo in range(0, signs.shape[0], _EIG_BATCH):
                part = (full[lo : lo + _EIG_BATCH] * block.term_values[g]).astype(dtype, copy=False)
                upper = np.asarray((scatter @ part.T).T).reshape(-1, n, n)
                mats = upper + np.conj(upper.transpose(0, 2, 1))
                mats[:, eye, eye] += diag
                # Gershgorin: diagonally dominant blocks are PSD and contribute nothing
                radius = np.abs(mats).sum(axis=2) - diag
                todo = np.flatnonzero((radius > diag).any(axis=1))
                if len(todo):
                    ev = np.linalg.eigvalsh(mats[todo])
                    out[lo + todo, g] = -np.where(ev < -NEG_TOL, ev, 0.0).sum(axis=1)
        return out

    def curves(self, perms: np.ndarray) -> np.ndarray:
        """Negativity curves (C, G) for a batch of permutations (C, m)."""
        perms = np.asarray(perms, dtype=np.int64)
        if perms.ndim != 2 or perms.shape[1] != self.n_modes:
            raise DomainError(f"permutations must have shape (C, {self.n_modes})")
        if np.any(np.sort(perms, axis=1) != np.arange(self.n_modes)):
            raise DomainError("each row must be a permutation of Rob's mode indices")
        par = self.parities(perms)
        total = np.zeros((perms.shape[0], len(self.grid)))
        for block in self.blocks:
            canon = self._canonical(block, par)
            packed = np.packbits(canon, axis=1)
            uniq, inverse = np.unique(packed, axis=0, return_inverse=True)
            inverse = inverse.ravel()
            rows = np.empty(len(uniq), dtype=np.int64)
            missing = []
            for j, row in enumerate(uniq):
                key = row.tobytes()
                hit = block.cache.get(key)
                if hit is None:
                    missing.append(j)
                else:
                    rows[j] = hit
            if missing:
                first = np.zeros(len(uniq), dtype=np.int64)
                first[inverse[::-1]] = np.arange(len(inverse))[::-1]
                fresh = self._block_curves(block, canon[first[missing]])
                base = len(block.table)
                block.table.extend(fresh)
                for offset, j in enumerate(missing):
                    block.cache[uniq[j].tobytes()] = base + offset
                    rows[j] = base + offset
            table = np.asarray(block.table)
            total += table[rows[inverse]]
        return total


# --- surveys ---------------------------------------------------------------

_WORKER_KERNEL: SurveyKernel | None = None


def _init_worker(spec, field_spec, grid):
    global _WORKER_KERNEL
    _WORKER_KERNEL = SurveyKernel(spec, field_spec, grid)


def _worker_curves(perms):
    return _WORKER_KERNEL.curves(perms), _WORKER_KERNEL.is_physical(perms)


class _Aggregator:
    def __init__(self, quantum: float):
        self.quantum = quantum
        self.index: dict[bytes, int] = {}
        self.fingerprints: list[np.ndarray] = []
        self.population: list[int] = []
        self.representative: list[np.ndarray] = []
        self.curve: list[np.ndarray] = []
        self.physical: list[bool] = []
        self.count = 0

    def add(self, perms: np.ndarray, curves: np.ndarray, physical: np.ndarray):
        fp = np.rint(curves / self.quantum).astype(np.int64)
        uniq, first, inverse, counts = np.unique(
            fp, axis=0, return_index=True, return_inverse=True, return_counts=True
        )
        inverse = inverse.ravel()
        phys_any = np.zeros(len(uniq), dtype=bool)
        np.logical_or.at(phys_any, inverse, physical)
        for j in np.argsort(first, kind="stable"):
            key = uniq[j].tobytes()
            c = self.index.get(key)
            if c is None:
                self.index[key] = len(self.population)
                self.fingerprints.append(uniq[j])
                self.population.append(int(counts[j]))
                self.representative.append(perms[first[j]].copy())
                self.curve.append(curves[first[j]].copy())
                self.physical.append(bool(phys_any[j]))
            else:
                self.population[c] += int(counts[j])
                self.physical[c] = self.physical[c] or bool(phys_any[j])
        self.count += len(perms)

    def classes(self) -> list[BehaviorClass]:
        order = sorted(
            range(len(self.population)),
            key=lambda c: (-self.population[c], tuple(self.fingerprints[c])),
        )
        return [
            BehaviorClass(
                CurveFingerprint(tuple(int(v) for v in self.fingerprints[c]), self.quantum),
                OrderingPermutation(tuple(int(v) for v in self.representative[c])),
                self.population[c],
                self.physical[c],
                self.curve[c],
            )
            for c in order
        ]


def _run(spec, field_spec, grid, quantum, chunks: Iterable[np.ndarray], workers: int):
    aggregator = _Aggregator(quantum)
    if workers <= 1:
        kernel = SurveyKernel(spec, field_spec, grid)
        for perms in chunks:
            aggregator.add(perms, kernel.curves(perms), kernel.is_physical(perms))
        return aggregator
    chunk_list = list(chunks)
    with ProcessPoolExecutor(
        max_workers=workers, initializer=_init_worker, initargs=(spec, field_spec, grid)
    ) as pool:
        for perms, (curves, physical) in zip(chunk_list, pool.map(_worker_curves, chunk_list)):
            aggregator.add(perms, curves, physical)
    return aggregator


def _chunked(perms: Iterable[Sequence[int]], size: int = CHUNK) -> Iterator[np.ndarray]:
    it = iter(perms)
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield np.array(block, dtype=np.int64)


def _prepare(spec, field_spec, q, grid, quantum):
    if q is not None:
        spec = spec.with_weights(q)
    grid = classification_grid() if grid is None else np.asarray(grid, dtype=float)
    if quantum <= 0:
        raise DomainError("quantum must be positive")
    return spec, grid


def survey_full(
    spec: JointStateSpec,
    field: FieldSpec,
    q: UnruhWeights | None = None,
    grid: Sequence[float] | None = None,
    quantum: float = DEFAULT_QUANTUM,
    workers: int = 1,
) -> SurveyReport:
    """Every ordering of Rob's modes, grouped by curve fingerprint."""
    spec, grid = _prepare(spec, field, q, grid, quantum)
    m = len(field.rob_modes)
    if m > MAX_ENUMERATED_MODES:
        raise EnumerationRefused(
            f"{m} modes give {math.factorial(m):.3g} orderings; sample them instead (mc-survey)"
        )
    agg = _run(spec, field, grid, quantum, _chunked(itertools.permutations(range(m))), workers)
    return SurveyReport(field, spec, grid, quantum, "full", agg.classes(), agg.count)


def survey_orderings(
    spec: JointStateSpec,
    field: FieldSpec,
    orderings: Sequence[OrderingPermutation],
    q: UnruhWeights | None = None,
    grid: Sequence[float] | None = None,
    quantum: float = DEFAULT_QUANTUM,
) -> SurveyReport:
    """Classify an explicit list of orderings."""
    spec, grid = _prepare(spec, field, q, grid, quantum)
    if not orderings:
        raise DomainError("no orderings given")
    agg = _run(spec, field, grid, quantum, _chunked(o.perm for o in orderings), 1)
    return SurveyReport(field, spec, grid, quantum, "explicit", agg.classes(), agg.count)


def sample_permutations(m: int, samples: int, seed: int, chunk: int = CHUNK) -> Iterator[np.ndarray]:
    """Uniform i.i.d. permutations of ``range(m)``, in fixed-size chunks."""
    rng = np.random.default_rng(seed)
    done = 0
    while done < samples:
        c = min(chunk, samples - done)
        yield rng.permuted(np.tile(np.arange(m, dtype=np.int64), (c, 1)), axis=1)
        done += c


def survey_monte_carlo(
    spec: JointStateSpec,
    field: FieldSpec,
    q: UnruhWeights | None = None,
    grid: Sequence[float] | None = None,
    quantum: float = DEFAULT_QUANTUM,
    samples: int = DEFAULT_MC_SAMPLES,
    seed: int = 0,
    workers: int = 1,
) -> SurveyReport:
    """Classify ``samples`` uniformly random orderings drawn from ``seed``."""
    if samples < 1:
        raise DomainError("need at least one sample")
    spec, grid = _prepare(spec, field, q, grid, quantum)
    m = len(field.rob_modes)
    agg = _run(spec, field, grid, quantum, sample_permutations(m, samples, seed), workers)
    return SurveyReport(
        field, spec, grid, quantum, "monte_carlo", agg.classes(), agg.count, samples, seed
    )


def physical_class(report: SurveyReport, field: FieldSpec) -> BehaviorClass:
    """The class holding the examined orderings with every region-II mode rightmost."""
    if report.field != field:
        raise DomainError(f"report was built for {report.field.name}, not {field.name}")
    hits = [c for c in report.classes if c.contains_physical]
    if not hits:
        raise DomainError("no examined ordering has all region-II modes rightmost")
    if len(hits) > 1:
        raise DomainError(f"region-II-rightmost orderings fall into {len(hits)} classes")
    return hits[0]
