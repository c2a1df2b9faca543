"""Tensor fields over a radial grid and their snapshot format.

Snapshots are self-describing text: a header block (name, link, valence,
grid) followed by the grid nodes and the component array in column-major
order, all floats written as C99 hex literals so that a round trip is
bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import IoError
from .grids import RadialGrid

_MAGIC = "g2lab-field 1"


@dataclass
class TensorField:
    """Components of an invariant tensor in the adapted frame over the grid."""

    values: np.ndarray          # (n, 7, 7, ...) frame components
    variances: str              # 'd'/'u' per tensor slot
    grid: RadialGrid
    link: str = ""
    name: str = ""
    sym: tuple = ()             # declared symmetric slot pairs, enforced on write
    radial_deriv: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim - 1 != len(self.variances):
            raise ValueError("variance string does not match component rank")
        if self.values.shape[0] != self.grid.n:
            raise ValueError("component array does not match the grid")
        for (i, j) in self.sym:
            si = np.swapaxes(self.values, 1 + i, 1 + j)
            if np.abs(self.values - si).max() > 1e-12 * max(1.0, np.abs(self.values).max()):
                raise ValueError(f"declared symmetry in slots ({i},{j}) violated")

    @property
    def rank(self):
        return self.values.ndim - 1

    def save(self, path):
        try:
            with open(path, "w", encoding="ascii") as fh:
                fh.write(f"{_MAGIC}\n")
                fh.write(f"name={self.name}\n")
                fh.write(f"link={self.link}\n")
                fh.write(f"valence={self.variances}\n")
                fh.write(f"sym={';'.join(f'{i},{j}' for i, j in self.sym)}\n")
                fh.write(f"spacing={self.grid.spacing}\n")
                fh.write(f"nodes={self.grid.n}\n")
                fh.write(f"shape={','.join(map(str, self.values.shape))}\n")
                fh.write("grid:\n")
                fh.write(" ".join(x.hex() for x in self.grid.nodes.tolist()) + "\n")
                fh.write("components:\n")
                flat = np.asfortranarray(self.values).ravel(order="F")
                for start in range(0, flat.size, 8):
                    fh.write(" ".join(x.hex() for x in flat[start : start + 8].tolist()) + "\n")
        except OSError as exc:
            raise IoError(f"cannot write snapshot {path}: {exc}") from exc

    @classmethod
    def load(cls, path):
        try:
            text = Path(path).read_text(encoding="ascii").splitlines()
        except OSError as exc:
            raise IoError(f"cannot read snapshot {path}: {exc}") from exc
        if not text or text[0] != _MAGIC:
            raise IoError(f"{path}: not a field snapshot")
        header = {}
        i = 1
        while not text[i].startswith("grid:"):
            key, _, val = text[i].partition("=")
            header[key] = val
            i += 1
        nodes = np.array([float.fromhex(tok) for tok in text[i + 1].split()])
        shape = tuple(int(s) for s in header["shape"].split(","))
        toks = []
        for line in text[i + 3 :]:
            toks.extend(line.split())
        flat = np.array([float.fromhex(tok) for tok in toks])
        values = flat.reshape(shape, order="F")
        sym = tuple(
            tuple(int(x) for x in pair.split(","))
            for pair in header["sym"].split(";")
            if pair
        )
        return cls(
            values=values,
            variances=header["valence"],
            grid=RadialGrid(nodes, spacing=header["spacing"]),
            link=header["link"],
            name=header["name"],
            sym=sym,
        )
