"""Source problems for the hardness reductions: Grid Tiling and PSI.

Both come with exhaustive ground-truth solvers and seeded generators; they
are oracles, not clever algorithms.

Grid Tiling orientation trap: two symmetric definitions circulate.  Here a
*row* shares the first coordinate (gamma[i][j] = (x,y) and gamma[i][j+1] =
(x',y') force x = x') and a *column* shares the second.  Everything in this
package emits and consumes that orientation.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Optional


class ProblemError(ValueError):
    pass


Pair = tuple[int, int]


@dataclass(frozen=True)
class GridTilingInstance:
    """k x k array of nonempty subsets of [n] x [n]; 1-based coordinates."""

    k: int
    n: int
    cells: tuple[tuple[frozenset[Pair], ...], ...]

    def __post_init__(self) -> None:
        if self.k < 1 or self.n < 1:
            raise ProblemError("k and n must be positive")
        if len(self.cells) != self.k or any(len(row) != self.k for row in self.cells):
            raise ProblemError("cells must form a k x k array")
        for row in self.cells:
            for cell in row:
                if not cell:
                    raise ProblemError("every cell must be nonempty")
                for (x, y) in cell:
                    if not (1 <= x <= self.n and 1 <= y <= self.n):
                        raise ProblemError(f"coordinate {(x, y)} outside [n]x[n]")

    def cell(self, i: int, j: int) -> frozenset[Pair]:
        """1-based cell access, S_{i,j}."""
        return self.cells[i - 1][j - 1]


@dataclass(frozen=True)
class GridTilingAssignment:
    """Chosen entry per cell; rows share x, columns share y."""

    gamma: tuple[tuple[Pair, ...], ...]

    def row_values(self) -> tuple[int, ...]:
        return tuple(row[0][0] for row in self.gamma)

    def column_values(self) -> tuple[int, ...]:
        return tuple(self.gamma[0][j][1] for j in range(len(self.gamma)))


def check_gridtiling(inst: GridTilingInstance, asg: GridTilingAssignment) -> bool:
    """Type-invariant checker, independent of the search code."""
    g = asg.gamma
    if len(g) != inst.k or any(len(row) != inst.k for row in g):
        return False
    for i in range(inst.k):
        for j in range(inst.k):
            if g[i][j] not in inst.cells[i][j]:
                return False
            if j + 1 < inst.k and g[i][j][0] != g[i][j + 1][0]:
                return False
            if i + 1 < inst.k and g[i][j][1] != g[i + 1][j][1]:
                return False
    return True


def solve_gridtiling(inst: GridTilingInstance) -> Optional[GridTilingAssignment]:
    """Exhaustive search over row values alpha and column values beta.

    n^(2k) candidate vectors instead of n^(k^2) cell choices; adequate for
    the desk scales used here (k <= 3, n <= 6).
    """
    k, n = inst.k, inst.n
    # Precompute which (alpha, beta) pairs each cell admits.
    admits = [[inst.cells[i][j] for j in range(k)] for i in range(k)]
    rng_alpha = list(product(range(1, n + 1), repeat=k))
    for alpha in rng_alpha:
        # Column j admits beta iff (alpha_i, beta) in S_{i,j} for all i.
        choices: list[list[int]] = []
        ok = True
        for j in range(k):
            feas = [b for b in range(1, n + 1)
                    if all((alpha[i], b) in admits[i][j] for i in range(k))]
            if not feas:
                ok = False
                break
            choices.append(feas)
        if not ok:
            continue
        beta = tuple(c[0] for c in choices)
        gamma = tuple(tuple((alpha[i], beta[j]) for j in range(k)) for i in range(k))
        asg = GridTilingAssignment(gamma)
        assert check_gridtiling(inst, asg)
        return asg
    return None


def normalize_gridtiling(inst: GridTilingInstance, shift: int) -> GridTilingInstance:
    """Pad the coordinate range so entries avoid the border.

    shift=2 (SCSS reduction): n' = n+2 and every (x,y) becomes (x+1,y+1),
    giving 1 < x,y < n'.  shift=1 (DSN reduction): n' = n+1, same coordinate
    bump, giving 1 < min(x,y).  Solvability is preserved.
    """
    if shift not in (1, 2):
        raise ProblemError("shift must be 1 or 2")
    cells = tuple(
        tuple(frozenset((x + 1, y + 1) for (x, y) in cell) for cell in row)
        for row in inst.cells
    )
    return GridTilingInstance(inst.k, inst.n + shift, cells)


def plant_gridtiling(seed: int, k: int, n: int, noise: int,
                     answer: str) -> GridTilingInstance:
    """Seeded test-instance generator.

    ``yes``: choose alpha, beta in [n]^k, put (alpha_i, beta_j) into every
    cell, then add ``noise`` random extra pairs per cell.  ``no``: rejection
    sample noise-only instances until the exhaustive solver reports none.
    """
    if n < 2:
        raise ProblemError("plant_gridtiling needs n >= 2")
    rng = random.Random(seed)
    if answer == "yes":
        alpha = [rng.randint(1, n) for _ in range(k)]
        beta = [rng.randint(1, n) for _ in range(k)]
        cells = []
        for i in range(k):
            row = []
            for j in range(k):
                cell = {(alpha[i], beta[j])}
                while len(cell) < 1 + noise:
                    cell.add((rng.randint(1, n), rng.randint(1, n)))
                row.append(frozenset(cell))
            cells.append(tuple(row))
        inst = GridTilingInstance(k, n, tuple(cells))
        assert solve_gridtiling(inst) is not None
        return inst
    if answer == "no":
        size = max(1, noise)
        for _attempt in range(200):
            cells = []
            for _i in range(k):
                row = []
                for _j in range(k):
                    cell = set()
                    while len(cell) < size:
                        cell.add((rng.randint(1, n), rng.randint(1, n)))
                    row.append(frozenset(cell))
                cells.append(tuple(row))
            inst = GridTilingInstance(k, n, tuple(cells))
            if solve_gridtiling(inst) is None:
                return inst
        raise ProblemError(
            f"could not sample an unsolvable instance for k={k}, n={n}, noise={noise}")
    raise ProblemError("answer must be 'yes' or 'no'")


@dataclass(frozen=True)
class PsiInstance:
    """Partitioned Subgraph Isomorphism.

    Pattern graph G on vertices g_1..g_ell (stored as 1-based ints), host
    graph H (opaque string vertex names) partitioned into classes H_1..H_ell.
    G must be connected.
    """

    ell: int
    pattern_edges: frozenset[tuple[int, int]]
    host_vertices: tuple[str, ...]
    host_class: dict[str, int]
    host_edges: frozenset[tuple[str, str]]

    def __post_init__(self) -> None:
        if self.ell < 1:
            raise ProblemError("pattern must have at least one vertex")
        for (a, b) in self.pattern_edges:
            if not (1 <= a < b <= self.ell):
                raise ProblemError(f"bad pattern edge {(a, b)}")
        for v in self.host_vertices:
            c = self.host_class.get(v)
            if c is None or not (1 <= c <= self.ell):
                raise ProblemError(f"host vertex {v!r} has no valid class")
        for (a, b) in self.host_edges:
            if a not in self.host_class or b not in self.host_class:
                raise ProblemError("host edge on undeclared vertex")
        if not self._pattern_connected():
            raise ProblemError("pattern graph must be connected")

    def _pattern_connected(self) -> bool:
        if self.ell == 1:
            return True
        adj: dict[int, set[int]] = {i: set() for i in range(1, self.ell + 1)}
        for a, b in self.pattern_edges:
            adj[a].add(b)
            adj[b].add(a)
        seen = {1}
        stack = [1]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.ell

    def host_class_members(self, i: int) -> list[str]:
        return [v for v in self.host_vertices if self.host_class[v] == i]

    def has_host_edge(self, a: str, b: str) -> bool:
        return tuple(sorted((a, b))) in self.host_edges


@dataclass(frozen=True)
class PsiAssignment:
    phi: dict[int, str]


def check_psi(inst: PsiInstance, asg: PsiAssignment) -> bool:
    phi = asg.phi
    if set(phi) != set(range(1, inst.ell + 1)):
        return False
    if len(set(phi.values())) != inst.ell:
        return False
    for i, v in phi.items():
        if inst.host_class[v] != i:
            return False
    for a, b in inst.pattern_edges:
        if not inst.has_host_edge(phi[a], phi[b]):
            return False
    return True


def solve_psi(inst: PsiInstance) -> Optional[PsiAssignment]:
    """Exhaustive search over the product of the partition classes."""
    classes = [inst.host_class_members(i) for i in range(1, inst.ell + 1)]
    if any(not c for c in classes):
        return None
    for combo in product(*classes):
        asg = PsiAssignment({i + 1: v for i, v in enumerate(combo)})
        if check_psi(inst, asg):
            return asg
    return None


def random_psi(seed: int, ell: int, class_size: int, edge_prob: float) -> PsiInstance:
    """Seeded PSI instance: random connected pattern, random host edges."""
    rng = random.Random(seed)
    # Random connected pattern on ell vertices: a random tree plus extras.
    pattern = set()
    for v in range(2, ell + 1):
        pattern.add((rng.randint(1, v - 1), v))
    for a in range(1, ell + 1):
        for b in range(a + 1, ell + 1):
            if (a, b) not in pattern and rng.random() < 0.3:
                pattern.add((a, b))
    host_vertices = []
    host_class = {}
    for i in range(1, ell + 1):
        for s in range(rng.randint(1, class_size)):
            name = f"h{i}_{s}"
            host_vertices.append(name)
            host_class[name] = i
    host_edges = set()
    for a in host_vertices:
        for b in host_vertices:
            if a < b and host_class[a] != host_class[b] and rng.random() < edge_prob:
                host_edges.add((a, b))
    return PsiInstance(
        ell=ell,
        pattern_edges=frozenset(pattern),
        host_vertices=tuple(sorted(host_vertices)),
        host_class=host_class,
        host_edges=frozenset(host_edges),
    )
