"""Labelled-compound files, the TUDataset converter, and bundled stand-in data.

Compound file format (one block per compound, ``#`` comments)::

    compound <id> <class>
    atom <idx> <beta>          # idx 0-based and consecutive, beta >= 1
    bond <i> <j> <xi>          # xi >= 1

Edge weights follow W_ij = beta_i * beta_j + xi_ij on bonded pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import InputError, LabelMissing, ParseError
from .graph import Graph, validate

# atom labels: C N O F I Cl Br -> 1..7; bond labels: aromatic single double triple -> 1..4
C, N, O, F, I, CL, BR = range(1, 8)
AROMATIC, SINGLE, DOUBLE, TRIPLE = range(1, 5)

PROTEIN_REFERENCE_COUNTS = {"nodes": 2361, "edges": 7182, "classes": 13}
COMPOUND_REFERENCE_COUNTS = {"compounds": 188}


@dataclass(frozen=True, eq=False)
class CompoundGraph:
    compound_id: str
    graph: Graph
    atom_labels: tuple
    bond_labels: dict
    cls: int


def compound_weights(atom_labels, bonds) -> np.ndarray:
    """W_ij = beta_i * beta_j + xi_ij for every bond (i, j, xi)."""
    beta = np.asarray(atom_labels, dtype=float)
    W = np.zeros((len(beta), len(beta)))
    for i, j, xi in bonds:
        W[i, j] = W[j, i] = beta[i] * beta[j] + xi
    return W


def make_compound(compound_id, cls: int, atom_labels, bonds) -> CompoundGraph:
    W = compound_weights(atom_labels, bonds)
    graph = validate(W, list(range(len(atom_labels))), list(atom_labels))
    return CompoundGraph(str(compound_id), graph, tuple(int(b) for b in atom_labels),
                         {(min(i, j), max(i, j)): int(x) for i, j, x in bonds}, int(cls))


def _positive_int(tok, what, lineno, path):
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"{what} must be an integer, got {tok!r}", lineno, path) from None
    if v < 1:
        raise ParseError(f"{what} must be >= 1, got {v}", lineno, path)
    return v


def read_compounds(path) -> list[CompoundGraph]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    out: list[CompoundGraph] = []
    current = None

    def finish():
        if current is None:
            return
        cid, cls, atoms, bonds, start = current
        if not atoms:
            raise ParseError(f"compound {cid} has no atoms", start, path)
        labels = []
        for idx in range(len(atoms)):
            if idx not in atoms:
                raise LabelMissing(f"compound {cid}: atom {idx} has no label", start, path)
            labels.append(atoms[idx])
        for i, j, _ in bonds:
            if i >= len(labels) or j >= len(labels):
                raise LabelMissing(f"compound {cid}: bond {i}-{j} references an unlabelled atom",
                                   start, path)
        out.append(make_compound(cid, cls, labels, bonds))

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        key = parts[0].lower()
        if key == "compound":
            finish()
            if len(parts) == 2:
                raise LabelMissing(f"compound {parts[1]} has no class label", lineno, path)
            if len(parts) != 3 or parts[2] not in ("0", "1"):
                raise ParseError(f"expected 'compound <id> <0|1>', got {line!r}", lineno, path)
            current = (parts[1], int(parts[2]), {}, [], lineno)
        elif current is None:
            raise ParseError(f"{key!r} line before any 'compound' header", lineno, path)
        elif key == "atom":
            if len(parts) == 2:
                raise LabelMissing(f"atom {parts[1]} has no label", lineno, path)
            if len(parts) != 3:
                raise ParseError(f"expected 'atom <idx> <beta>', got {line!r}", lineno, path)
            try:
                idx = int(parts[1])
            except ValueError:
                raise ParseError(f"bad atom index {parts[1]!r}", lineno, path) from None
            if idx < 0 or idx in current[2]:
                raise ParseError(f"bad or repeated atom index {idx}", lineno, path)
            current[2][idx] = _positive_int(parts[2], "atom label", lineno, path)
        elif key == "bond":
            if len(parts) == 3:
                raise LabelMissing(f"bond {parts[1]}-{parts[2]} has no label", lineno, path)
            if len(parts) != 4:
                raise ParseError(f"expected 'bond <i> <j> <xi>', got {line!r}", lineno, path)
            try:
                i, j = int(parts[1]), int(parts[2])
            except ValueError:
                raise ParseError(f"bad bond endpoints in {line!r}", lineno, path) from None
            if i < 0 or j < 0 or i == j:
                raise ParseError(f"bad bond endpoints in {line!r}", lineno, path)
            current[3].append((i, j, _positive_int(parts[3], "bond label", lineno, path)))
        else:
            raise ParseError(f"unknown directive {parts[0]!r}", lineno, path)
    finish()
    return out


def write_compounds(compounds, path, header: str | None = None) -> None:
    lines = []
    if header:
        lines += [f"# {h}" for h in header.splitlines()]
    for c in compounds:
        lines.append(f"compound {c.compound_id} {c.cls}")
        lines += [f"atom {i} {b}" for i, b in enumerate(c.atom_labels)]
        lines += [f"bond {i} {j} {x}" for (i, j), x in sorted(c.bond_labels.items())]
    Path(path).write_text("\n".join(lines) + "\n")


# -- TUDataset ---------------------------------------------------------------

def _read_ints(path: Path, cols=None) -> np.ndarray:
    if not path.exists():
        raise InputError(f"no such file: {path}")
    rows = []
    for lineno, raw in enumerate(path.read_text().splitlines(), 1):
        raw = raw.strip()
        if not raw:
            continue
        try:
            rows.append([int(t) for t in raw.replace(",", " ").split()])
        except ValueError:
            raise ParseError(f"expected integers, got {raw!r}", lineno, path) from None
        if cols is not None and len(rows[-1]) != cols:
            raise ParseError(f"expected {cols} columns", lineno, path)
    return np.array(rows, dtype=int)


def convert_tudataset(directory, name: str = "MUTAG") -> list[CompoundGraph]:
    """Compounds from a TUDataset directory (``<name>_A.txt`` and friends).

    Graph label 1 becomes class 1, anything else class 0; node and edge
    labels are shifted by +1 so they start at 1.
    """
    d = Path(directory)
    A = _read_ints(d / f"{name}_A.txt", 2) - 1
    indicator = _read_ints(d / f"{name}_graph_indicator.txt", 1)[:, 0] - 1
    glabels = _read_ints(d / f"{name}_graph_labels.txt", 1)[:, 0]
    nlabels = _read_ints(d / f"{name}_node_labels.txt", 1)[:, 0] + 1
    epath = d / f"{name}_edge_labels.txt"
    elabels = _read_ints(epath, 1)[:, 0] + 1 if epath.exists() else np.ones(len(A), dtype=int)
    if len(elabels) != len(A):
        raise ParseError("edge label count does not match edge count", None, epath)
    out = []
    for g in range(len(glabels)):
        nodes = np.flatnonzero(indicator == g)
        local = {int(v): i for i, v in enumerate(nodes)}
        bonds = {}
        for (u, v), x in zip(A, elabels):
            if u in local and v in local and u != v:
                bonds[(min(local[u], local[v]), max(local[u], local[v]))] = int(x)
        out.append(make_compound(g + 1, int(glabels[g] == 1), nlabels[nodes].tolist(),
                                 [(i, j, x) for (i, j), x in sorted(bonds.items())]))
    return out


# -- bundled stand-in data ---------------------------------------------------

def bundled_path(name: str) -> Path:
    """Path of a data file shipped with the package."""
    return Path(str(resources.files("netgauss") / "data" / name))


class _Molecule:
    def __init__(self):
        self.atoms: list[int] = []
        self.bonds: list[tuple[int, int, int]] = []

    def atom(self, label: int) -> int:
        self.atoms.append(label)
        return len(self.atoms) - 1

    def bond(self, i: int, j: int, kind: int):
        self.bonds.append((i, j, kind))

    def ring(self, size=6, fuse_with=None) -> list:
        """Aromatic carbon ring, optionally sharing the bond ``fuse_with``."""
        if fuse_with is None:
            ring = [self.atom(C) for _ in range(size)]
            for k in range(size):
                self.bond(ring[k], ring[(k + 1) % size], AROMATIC)
            return ring
        a, b = fuse_with
        new = [self.atom(C) for _ in range(size - 2)]
        chain = [b] + new + [a]
        for u, v in zip(chain, chain[1:]):
            self.bond(u, v, AROMATIC)
        return [a, b] + new

    def free_carbons(self) -> list:
        deg = np.zeros(len(self.atoms), dtype=int)
        for i, j, _ in self.bonds:
            deg[i] += 1
            deg[j] += 1
        return [i for i, lab in enumerate(self.atoms) if lab == C and deg[i] == 2]


def _substituent(mol: _Molecule, site: int, kind: str, rng: np.random.Generator):
    if kind == "nitro":
        n = mol.atom(N)
        mol.bond(site, n, SINGLE)
        for _ in range(2):
            mol.bond(n, mol.atom(O), DOUBLE)
    elif kind == "halogen":
        mol.bond(site, mol.atom(int(rng.choice([F, CL, BR, I]))), SINGLE)
    elif kind == "hydroxyl":
        mol.bond(site, mol.atom(O), SINGLE)
    elif kind == "amine":
        mol.bond(site, mol.atom(N), SINGLE)
    elif kind == "methyl":
        mol.bond(site, mol.atom(C), SINGLE)
    elif kind == "carboxyl":
        c = mol.atom(C)
        mol.bond(site, c, SINGLE)
        mol.bond(c, mol.atom(O), DOUBLE)
        mol.bond(c, mol.atom(O), SINGLE)
    elif kind == "nitrile":
        c = mol.atom(C)
        mol.bond(site, c, SINGLE)
        mol.bond(c, mol.atom(N), TRIPLE)


def _synthetic_molecule(rng: np.random.Generator, positive: bool) -> _Molecule:
    mol = _Molecule()
    rings = int(rng.choice([2, 3, 3, 4])) if positive else int(rng.choice([1, 1, 2]))
    ring = mol.ring()
    for _ in range(rings - 1):
        k = int(rng.integers(1, 5))
        ring = mol.ring(fuse_with=(ring[k], ring[k + 1]))
    if positive:
        kinds = ["nitro"] * int(rng.choice([1, 1, 2])) + list(
            rng.choice(["methyl", "amine", "nitro", "hydroxyl"], size=int(rng.integers(0, 2))))
    else:
        kinds = list(rng.choice(["halogen", "hydroxyl", "methyl", "carboxyl", "nitrile", "amine"],
                                size=int(rng.integers(1, 4))))
        if rng.random() < 0.1:
            kinds.append("nitro")
    for kind in kinds:
        sites = mol.free_carbons()
        if not sites:
            break
        _substituent(mol, int(rng.choice(sites)), str(kind), rng)
    return mol


def synthetic_compounds(seed: int = 188, positives: int = 125, negatives: int = 63) -> list:
    """Mutagenicity-like stand-in: fused aromatic rings, nitro-rich positives."""
    rng = np.random.default_rng(seed)
    classes = [1] * positives + [0] * negatives
    order = rng.permutation(len(classes))
    out = []
    for cid, idx in enumerate(order, 1):
        mol = _synthetic_molecule(rng, classes[idx] == 1)
        out.append(make_compound(cid, classes[idx], mol.atoms, mol.bonds))
    return out


def synthetic_protein_network(seed: int = 13, classes: int = 13, per_class: int = 30,
                              cross_rho: float = 0.004) -> Graph:
    """Class-structured stand-in for a protein interaction network.

    Each class is a small-world community whose ring degree and rewiring
    rate depend on the class, so ego-networks carry class-specific shape;
    sparse random edges join the communities.
    """
    rng = np.random.default_rng(seed)
    n = classes * per_class
    W = np.zeros((n, n))
    labels = np.repeat(np.arange(1, classes + 1), per_class)
    for c in range(classes):
        base = c * per_class
        half = 1 + c % 5                    # ring degree 2..10
        beta = 0.05 * (c % 4)
        for i in range(per_class):
            for o in range(1, half + 1):
                j = (i + o) % per_class
                if rng.random() < beta:
                    j = int(rng.integers(per_class))
                    if j == i:
                        continue
                W[base + i, base + j] = W[base + j, base + i] = 1.0
    cross = np.triu(rng.random((n, n)) < cross_rho, 1) & (labels[:, None] != labels[None, :])
    W[cross | cross.T] = 1.0
    np.fill_diagonal(W, 0.0)
    return validate(W, [f"P{i + 1:04d}" for i in range(n)], labels.tolist())


def protein_sanity(graph: Graph) -> dict:
    """Observed counts next to the reference network's; informational only."""
    observed = {"nodes": graph.n, "edges": graph.edge_count,
                "classes": len(set(graph.node_labels)) if graph.node_labels else 0}
    return {"observed": observed, "reference": dict(PROTEIN_REFERENCE_COUNTS),
            "matches_reference": observed == PROTEIN_REFERENCE_COUNTS}
