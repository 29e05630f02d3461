"""Scalar and vector fields on axis-aligned rectangular grids.

Conventions used throughout the package:

* Fields live at cell centers of a uniform rectangular grid and are stored
  as C-ordered (row-major) float64 arrays whose shape equals the grid sizes.
* Every field is implicitly extended by zero outside its grid box.  This is
  the discrete stand-in for compactly supported functions, and all boundary
  handling (differences, window averages) follows from it.
* Derivatives are forward differences ``(u(x + h_i e_i) - u(x)) / h_i`` with
  the zero extension supplying the value past the far face.  Forward
  differences are deliberate: one-sided slope bounds on an extension then
  translate verbatim into bounds on the positive/negative parts of these
  differences.
* Integrals are midpoint Riemann sums: sum of cell values times cell volume.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "FieldFormatError",
    "GridSpec",
    "ScalarField",
    "VectorField",
    "OrliczWeight",
    "gradient",
    "positive_part",
    "negative_part",
    "orlicz_integral",
    "log_integral",
    "superlevel_measure",
    "write_field",
    "read_field",
]

MAX_DIM = 3

_MAGIC = b"TRNC"
_VERSION = 1


class FieldFormatError(Exception):
    """Raised when a serialized field cannot be decoded."""


@dataclass(frozen=True)
class GridSpec:
    """Geometry of a rectangular grid: sizes, spacings and origin per axis.

    ``origin`` is the coordinate of the *center* of the first cell.  The
    center of cell ``(i_1, ..., i_d)`` sits at ``origin + i * spacings``.
    """

    sizes: tuple[int, ...]
    spacings: tuple[float, ...]
    origin: tuple[float, ...] = ()

    def __post_init__(self):
        sizes = tuple(int(n) for n in self.sizes)
        spacings = tuple(float(h) for h in self.spacings)
        origin = tuple(float(o) for o in self.origin) if self.origin else (0.0,) * len(sizes)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "spacings", spacings)
        object.__setattr__(self, "origin", origin)
        d = len(sizes)
        if not 1 <= d <= MAX_DIM:
            raise ValueError(f"grid dimension must be in 1..{MAX_DIM}, got {d}")
        if len(spacings) != d or len(origin) != d:
            raise ValueError("sizes, spacings and origin must have equal length")
        if any(n < 2 for n in sizes):
            raise ValueError(f"all grid sizes must be >= 2, got {sizes}")
        if any(not (h > 0.0) or not math.isfinite(h) for h in spacings):
            raise ValueError(f"all spacings must be positive finite, got {spacings}")
        if any(not math.isfinite(o) for o in origin):
            raise ValueError("origin must be finite")

    @property
    def dim(self) -> int:
        return len(self.sizes)

    @property
    def num_cells(self) -> int:
        return int(np.prod(self.sizes))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    def axis_coords(self, axis: int) -> np.ndarray:
        """Cell-center coordinates along one axis."""
        return self.origin[axis] + self.spacings[axis] * np.arange(self.sizes[axis])

    def meshgrid(self) -> list[np.ndarray]:
        """Cell-center coordinate arrays, one per axis, each of full grid shape."""
        axes = [self.axis_coords(i) for i in range(self.dim)]
        return list(np.meshgrid(*axes, indexing="ij"))


@dataclass(frozen=True)
class ScalarField:
    """A sampled real-valued function on a grid, zero outside the grid box."""

    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.ascontiguousarray(np.asarray(self.values, dtype=np.float64))
        if arr.shape != self.spec.sizes:
            if arr.size == self.spec.num_cells:
                arr = arr.reshape(self.spec.sizes)
            else:
                raise ValueError(
                    f"values have {arr.size} entries, grid has {self.spec.num_cells} cells"
                )
        if not np.isfinite(arr).all():
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", arr)

    @classmethod
    def zeros(cls, spec: GridSpec) -> "ScalarField":
        return cls(spec, np.zeros(spec.sizes))

    def with_values(self, values: np.ndarray) -> "ScalarField":
        return ScalarField(self.spec, values)


@dataclass(frozen=True)
class VectorField:
    """A tuple of scalar components sharing one grid (gradients, fluxes)."""

    spec: GridSpec
    components: tuple[ScalarField, ...]

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("vector field needs at least one component")
        for c in comps:
            if c.spec != self.spec:
                raise ValueError("all components must share the grid spec")

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> ScalarField:
        return self.components[i]

    def as_array(self) -> np.ndarray:
        """Stack components into one array of shape (ncomp, *sizes)."""
        return np.stack([c.values for c in self.components])


@dataclass(frozen=True)
class OrliczWeight:
    """Weight ``t^p * log(1+t)^alpha`` used in the integrability estimates."""

    p: float
    alpha: float = 0.0

    def __post_init__(self):
        if not self.p > 1.0:
            raise ValueError(f"weight exponent p must be > 1, got {self.p}")
        if not (math.isfinite(self.p) and math.isfinite(self.alpha)):
            raise ValueError("weight parameters must be finite")


def gradient(u: ScalarField) -> VectorField:
    """Forward-difference gradient with zero extension past the far faces.

    Component ``i`` at a cell is ``(u(x + h_i e_i) - u(x)) / h_i``; cells on
    the far face use the zero extension, so the last difference is
    ``(0 - u(x)) / h_i``.
    """
    comps = []
    v = u.values
    for axis in range(u.spec.dim):
        h = u.spec.spacings[axis]
        out = np.empty_like(v)
        lead = [slice(None)] * v.ndim
        head = [slice(None)] * v.ndim
        lead[axis] = slice(1, None)
        head[axis] = slice(0, -1)
        out[tuple(head)] = (v[tuple(lead)] - v[tuple(head)]) / h
        last = [slice(None)] * v.ndim
        last[axis] = -1
        out[tuple(last)] = (0.0 - v[tuple(last)]) / h
        comps.append(ScalarField(u.spec, out))
    return VectorField(u.spec, tuple(comps))


def positive_part(v: ScalarField) -> ScalarField:
    """Pointwise max(v, 0)."""
    return v.with_values(np.maximum(v.values, 0.0))


def negative_part(v: ScalarField) -> ScalarField:
    """Pointwise max(-v, 0), so that v = positive_part - negative_part."""
    return v.with_values(np.maximum(-v.values, 0.0))


def orlicz_integral(g: ScalarField, w: OrliczWeight) -> float:
    """Riemann sum of ``|g|^p * log(1 + |g|)^alpha``.

    Cells where g vanishes contribute 0 even for negative alpha, matching
    the limit of the integrand ``t^p log(1+t)^alpha -> 0`` as ``t -> 0+``
    for p > 1.
    """
    a = np.abs(g.values)
    nz = a > 0.0
    if not nz.any():
        return 0.0
    an = a[nz]
    contrib = an**w.p * np.log1p(an) ** w.alpha
    return float(contrib.sum()) * g.spec.cell_volume


def log_integral(g: ScalarField, w: OrliczWeight) -> float:
    """Riemann sum of ``g * log(1 + g)^(alpha+1)`` for a nonnegative field.

    Zero cells contribute 0 (relevant when alpha + 1 < 0).
    """
    a = g.values
    if (a < 0.0).any():
        raise ValueError("log_integral requires a nonnegative field")
    nz = a > 0.0
    if not nz.any():
        return 0.0
    an = a[nz]
    contrib = an * np.log1p(an) ** (w.alpha + 1.0)
    return float(contrib.sum()) * g.spec.cell_volume


def superlevel_measure(g: ScalarField, t: float) -> float:
    """Discrete measure of the strict superlevel set {g > t}."""
    return float(np.count_nonzero(g.values > t)) * g.spec.cell_volume


# ---------------------------------------------------------------------------
# serialization
#
# Binary layout (little endian): magic "TRNC", u32 version, u8 dim, then per
# axis a u64 size followed by an f64 spacing, then the payload as f64 in
# row-major order.  The origin is not part of the format; a read field has
# origin 0.
# ---------------------------------------------------------------------------


def write_field(u: ScalarField, path, fmt: str = "binary") -> None:
    if fmt == "binary":
        _write_binary(u, path)
    elif fmt == "csv":
        _write_csv(u, path)
    else:
        raise ValueError(f"unknown field format {fmt!r}")


def read_field(path, fmt: str | None = None) -> ScalarField:
    """Read a field, sniffing binary vs CSV from the leading bytes."""
    if fmt is None:
        with open(path, "rb") as fh:
            head = fh.read(4)
        fmt = "binary" if head == _MAGIC else "csv"
    if fmt == "binary":
        return _read_binary(path)
    if fmt == "csv":
        return _read_csv(path)
    raise ValueError(f"unknown field format {fmt!r}")


def _write_binary(u: ScalarField, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", _VERSION))
        fh.write(struct.pack("<B", u.spec.dim))
        for n, h in zip(u.spec.sizes, u.spec.spacings):
            fh.write(struct.pack("<Qd", n, h))
        fh.write(np.ascontiguousarray(u.values, dtype="<f8").tobytes())


def _read_binary(path) -> ScalarField:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 9 or data[:4] != _MAGIC:
        raise FieldFormatError(f"{path}: not a TRNC field file (bad magic)")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != _VERSION:
        raise FieldFormatError(f"{path}: unsupported format version {version}")
    (dim,) = struct.unpack_from("<B", data, 8)
    if not 1 <= dim <= MAX_DIM:
        raise FieldFormatError(f"{path}: dimension {dim} out of range 1..{MAX_DIM}")
    off = 9
    sizes, spacings = [], []
    for _ in range(dim):
        if off + 16 > len(data):
            raise FieldFormatError(f"{path}: truncated header")
        n, h = struct.unpack_from("<Qd", data, off)
        off += 16
        sizes.append(n)
        spacings.append(h)
    try:
        spec = GridSpec(tuple(sizes), tuple(spacings))
    except ValueError as exc:
        raise FieldFormatError(f"{path}: invalid grid header ({exc})") from exc
    expected = spec.num_cells * 8
    payload = data[off:]
    if len(payload) != expected:
        raise FieldFormatError(
            f"{path}: payload has {len(payload)} bytes, header promises {expected}"
        )
    values = np.frombuffer(payload, dtype="<f8").astype(np.float64).reshape(spec.sizes)
    if not np.isfinite(values).all():
        raise FieldFormatError(f"{path}: payload contains non-finite values")
    return ScalarField(spec, values)


def _write_csv(u: ScalarField, path) -> None:
    with open(path, "w") as fh:
        sizes = ",".join(str(n) for n in u.spec.sizes)
        spacings = ",".join(f"{h:.17g}" for h in u.spec.spacings)
        fh.write(f"# dims={u.spec.dim} sizes={sizes} spacings={spacings}\n")
        for val in u.values.ravel(order="C"):
            fh.write(f"{val:.17g}\n")


def _read_csv(path) -> ScalarField:
    with open(path) as fh:
        header = fh.readline().strip()
        if not header.startswith("#"):
            raise FieldFormatError(f"{path}: missing CSV field header")
        fields = dict(
            item.split("=", 1) for item in header.lstrip("#").split() if "=" in item
        )
        try:
            dim = int(fields["dims"])
            sizes = tuple(int(s) for s in fields["sizes"].split(","))
            spacings = tuple(float(s) for s in fields["spacings"].split(","))
        except (KeyError, ValueError) as exc:
            raise FieldFormatError(f"{path}: malformed CSV header ({exc})") from exc
        if len(sizes) != dim or len(spacings) != dim:
            raise FieldFormatError(f"{path}: header dims/sizes/spacings disagree")
        try:
            spec = GridSpec(sizes, spacings)
        except ValueError as exc:
            raise FieldFormatError(f"{path}: invalid grid header ({exc})") from exc
        try:
            values = np.array([float(line) for line in fh if line.strip()])
        except ValueError as exc:
            raise FieldFormatError(f"{path}: malformed value line ({exc})") from exc
    if values.size != spec.num_cells:
        raise FieldFormatError(
            f"{path}: {values.size} values for {spec.num_cells} cells"
        )
    if not np.isfinite(values).all():
        raise FieldFormatError(f"{path}: payload contains non-finite values")
    return ScalarField(spec, values.reshape(spec.sizes))
