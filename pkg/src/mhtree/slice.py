"""Rasterized diagonal slices of the membership domain.

Each pixel samples the diagonal point (z, ..., z) at its center.  Two
analytic fast paths avoid the search where the answer is known: outside
the disk |z|^(n-2) <= 2 membership always holds, and for real z inside it
the root geodesic weight z^(n-2) lies on the segment [-2, 2], so
membership always fails.  Every other pixel runs the full membership
search with the job's per-pixel budget; pixels the budget cannot settle
render as an explicit gray rather than a guess.

Output is deterministic for a given job: pixel centers, row-major order,
fixed budgets, no sampling noise.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass

from .bowditch import DomainWitness, MembershipVerdict, Status, is_in_domain
from .hurwitz import HurwitzPoint
from .tree import GeodesicAddress

EXTERIOR_MARGIN = 1e-9
COLORINGS = ("binary", "tree-size", "K-level")

_WHITE = (255, 255, 255)
_GRAY = (128, 128, 128)
_BLACK = (0, 0, 0)


@dataclass(frozen=True)
class SliceJob:
    """A rasterization request for one rectangular window of the slice."""

    n: int
    center: complex = 0j
    width: float = 8.0
    height: float = 8.0
    resolution: tuple[int, int] = (64, 64)
    K: float = 2.5
    budget: int = 10**5
    coloring: str = "binary"

    def __post_init__(self) -> None:
        if self.n < 3:
            raise ValueError(f"arity must be at least 3, got {self.n}")
        if not (self.width > 0 and self.height > 0):
            raise ValueError("window must be nondegenerate (positive width and height)")
        rw, rh = self.resolution
        if rw < 1 or rh < 1:
            raise ValueError(f"resolution must be at least 1x1, got {rw}x{rh}")
        if self.K <= 2.0:
            raise ValueError(f"K must exceed 2, got {self.K}")
        if self.budget < 1:
            raise ValueError(f"per-pixel budget must be positive, got {self.budget}")
        if self.coloring not in COLORINGS:
            raise ValueError(f"coloring must be one of {COLORINGS}, got {self.coloring!r}")

    def pixel_point(self, row: int, col: int) -> complex:
        """The window point at the center of pixel (row, col), row 0 on top."""
        rw, rh = self.resolution
        if not (0 <= row < rh and 0 <= col < rw):
            raise IndexError(f"pixel ({row}, {col}) outside {rw}x{rh}")
        re = self.center.real - self.width / 2 + (col + 0.5) * self.width / rw
        im = self.center.imag + self.height / 2 - (row + 0.5) * self.height / rh
        return complex(re, im)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "center": [self.center.real, self.center.imag],
            "width": self.width,
            "height": self.height,
            "resolution": list(self.resolution),
            "K": self.K,
            "budget": self.budget,
            "coloring": self.coloring,
        }


def classify_pixel(job: SliceJob, z: complex) -> MembershipVerdict:
    """Membership of the diagonal point (z, ..., z), fast paths first.

    The exterior fast path returns InDomain with an "exterior-disk" witness
    and no tree; the real fast path returns NotInDomain with the root
    geodesic as a segment witness (this also covers z = 0, which the full
    search would reject as dihedral).  Real z within the margin band just
    outside the disk falls through to the search, which may honestly return
    Undetermined there: the search cost diverges toward the circle.
    """
    z = complex(z)
    r = abs(z) ** (job.n - 2)
    if r > 2.0 + EXTERIOR_MARGIN:
        witness = DomainWitness(
            kind="exterior-disk",
            note=f"|z|^{job.n - 2} = {r:.9g} exceeds 2",
        )
        return MembershipVerdict(status=Status.IN_DOMAIN, K=job.K, witness=witness)
    if z.imag == 0.0 and r <= 2.0:
        phi = z.real ** (job.n - 2)
        witness = DomainWitness(
            kind="segment-phi",
            geodesic=GeodesicAddress(job.n, (), (1, 2)),
            phi=complex(phi),
            note="real diagonal point; the root geodesic weight lies on [-2, 2]",
        )
        return MembershipVerdict(status=Status.NOT_IN_DOMAIN, K=job.K, witness=witness)
    point = HurwitzPoint.from_coords((z,) * job.n)
    return is_in_domain(point, job.K, budget=job.budget)


def _color(verdict: MembershipVerdict, coloring: str) -> tuple[int, int, int]:
    if verdict.status is Status.NOT_IN_DOMAIN:
        return _WHITE
    if verdict.status is Status.UNDETERMINED:
        return _GRAY
    if coloring == "tree-size":
        vertices = len(verdict.tree.vertices) if verdict.tree is not None else 1
        return (0, min(220, 8 * (vertices - 1)), 0)
    if coloring == "K-level":
        members = len(verdict.a_phi_K) if verdict.a_phi_K is not None else 0
        return (0, 0, min(220, 12 * members))
    return _BLACK


@dataclass(frozen=True)
class RenderResult:
    """A finished render: verdict grid, raw pixels, PPM image, and summary."""

    job: SliceJob
    verdicts: tuple[tuple[Status, ...], ...]
    pixels: bytes
    summary: dict

    @property
    def ppm(self) -> bytes:
        rw, rh = self.job.resolution
        return f"P6\n{rw} {rh}\n255\n".encode() + self.pixels

    def pixel_color(self, row: int, col: int) -> tuple[int, int, int]:
        rw, _ = self.job.resolution
        base = 3 * (row * rw + col)
        return tuple(self.pixels[base: base + 3])


def _write_bytes(path, data: bytes) -> None:
    try:
        with open(path, "wb") as handle:
            handle.write(data)
    except OSError as exc:
        raise OSError(f"could not write {path}: {exc}") from exc


def render(
    job: SliceJob,
    out_path=None,
    png_path=None,
    summary_path=None,
) -> RenderResult:
    """Classify every pixel of the job and assemble image plus summary.

    Rows are rendered top to bottom in a fixed order, so identical jobs
    produce bit-identical images.  out_path receives binary PPM (P6),
    png_path a PNG through Pillow when requested, summary_path the JSON
    summary; all three are optional and the result carries everything.
    """
    rw, rh = job.resolution
    started = time.perf_counter()
    counts = dict.fromkeys(Status, 0)
    verdict_rows = []
    pixels = bytearray()
    for row in range(rh):
        statuses = []
        for col in range(rw):
            verdict = classify_pixel(job, job.pixel_point(row, col))
            statuses.append(verdict.status)
            counts[verdict.status] += 1
            pixels.extend(_color(verdict, job.coloring))
        verdict_rows.append(tuple(statuses))
    elapsed = time.perf_counter() - started
    summary = {
        "job": job.to_json(),
        "counts": {status.value: counts[status] for status in Status},
        "seconds": round(elapsed, 3),
    }
    result = RenderResult(
        job=job,
        verdicts=tuple(verdict_rows),
        pixels=bytes(pixels),
        summary=summary,
    )
    if out_path is not None:
        _write_bytes(out_path, result.ppm)
    if png_path is not None:
        try:
            from PIL import Image
        except ImportError as exc:
            raise ValueError(
                "PNG output requires Pillow; use the PPM output instead"
            ) from exc
        image = Image.frombytes("RGB", (rw, rh), result.pixels)
        try:
            image.save(png_path, format="PNG")
        except OSError as exc:
            raise OSError(f"could not write {png_path}: {exc}") from exc
    if summary_path is not None:
        _write_bytes(summary_path, json.dumps(summary, indent=2).encode())
    return result
