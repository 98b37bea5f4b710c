"""Physical resource counting and space cost.

Counts physical qubits, couplers, and interconnect rails per architecture
family.  Each count function returns a :class:`ResourceCounts` whose top
fields are architecture totals and whose breakdown maps tier names to their
contributions.  Counting conventions:

* every actively corrected tier of a homogeneous device carries two local
  couplers per qubit (tunable couplers both sides), so local couplers are
  2x total qubits there;
* heterogeneous devices double only the compute tier and add one coupler
  per interconnect rail;
* interconnect rails are pumped, so they appear both in active qubits and
  in the interconnect column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .arch import (ArchitectureSpec, GROSS_BLOCK_LOGICAL, GROSS_BLOCK_PHYSICAL,
                   ModuleSpec, derive_boundary)


@dataclass
class ResourceCounts:
    qubits_active: int = 0
    qubits_static: int = 0
    couplers_local: int = 0
    couplers_nonlocal: int = 0
    interconnects: int = 0
    breakdown: dict[str, int] = field(default_factory=dict)

    @property
    def total_qubits(self) -> int:
        return self.qubits_active + self.qubits_static

    @property
    def total_couplers(self) -> int:
        return self.couplers_local + self.couplers_nonlocal


@dataclass(frozen=True)
class CostWeights:
    """Weights of the linear space-cost functional.

    Defaults: static qubits half the weight of active ones; non-local
    couplers four times local; interconnect rails half local.
    """

    w_active: float = 1.0
    w_static: float = 0.5
    w_local: float = 1.0
    w_nonlocal: float = 4.0
    w_inter: float = 0.5


def space_cost(rc: ResourceCounts, w: CostWeights = CostWeights()) -> float:
    """Linear functional over the five resource classes."""
    return (w.w_active * rc.qubits_active + w.w_static * rc.qubits_static
            + w.w_local * rc.couplers_local
            + w.w_nonlocal * rc.couplers_nonlocal
            + w.w_inter * rc.interconnects)


def count_homogeneous(n: int, d: int, c_anc: float = 1.0,
                      n_edges: int | None = None,
                      n_mf_per_qpu: float = 3.0, n_dist: int = 72) -> ResourceCounts:
    """Single-tier surface-code device with on-chip factories.

    Tiers: logical patches n*(1+c_anc)*d^2, lattice-surgery routing
    2*n_edges*d, state injection 2*d*n, distillation
    n_mf_per_qpu*n_dist*n*d^2.  All tiers actively corrected.
    """
    if n_edges is None:
        n_edges = 2 * n
    logical = round(n * (1 + c_anc) * d * d)
    surgery = 2 * n_edges * d
    inject = 2 * d * n
    distill = round(n_mf_per_qpu * n_dist * n * d * d)
    active = logical + surgery + inject + distill
    return ResourceCounts(
        qubits_active=active,
        couplers_local=2 * active,
        breakdown={
            "qubits_logical": logical,
            "qubits_surgery": surgery,
            "qubits_injection": inject,
            "qubits_distillation": distill,
            "couplers_logical": 2 * logical,
            "couplers_surgery": 2 * surgery,
            "couplers_injection": 2 * inject,
            "couplers_distillation": 2 * distill,
        })


def _qpu_tiers(qpu: ModuleSpec, qsf: ModuleSpec | None) -> dict[str, int]:
    d = qpu.code.distance
    n = qpu.n_logical
    n_edges = qpu.n_edges if qpu.n_edges is not None else n
    tiers = {
        "qubits_logical": round(n * (1 + qpu.code.c_anc) * d * d),
        "qubits_surgery": 2 * n_edges * d,
        "qubits_injection": 2 * d * n,
    }
    if qsf is not None:
        tiers["qubits_distillation"] = round(
            qsf.n_mf_per_qpu * qsf.n_dist * n * d * d)
    return tiers


def count_heterogeneous_stqm(spec: ArchitectureSpec) -> ResourceCounts:
    """Compute core + passive short-term memory joined transversally.

    Memory patches are stored at the compute distance without readout
    ancillas (static).  Interconnect rails: one per boundary qubit times
    (1 + n_anc_pump) pump ancillas.
    """
    qpu = spec.by_kind("QPU")[0]
    qsf = (spec.by_kind("QSF") or [None])[0]
    stqm = spec.by_kind("STQM")[0]
    link = next(l for l in spec.links_of(stqm.id))
    bdry = derive_boundary(spec, link)
    d = qpu.code.distance
    tiers = _qpu_tiers(qpu, qsf)
    rails = bdry.n_bdry * d * d * (1 + link.n_anc_pump)
    tiers["qubits_interconnect"] = rails
    static = stqm.n_logical * d * d
    local = 2 * tiers["qubits_logical"] + bdry.n_bdry * d * d
    rc = ResourceCounts(
        qubits_active=sum(tiers.values()),
        qubits_static=static,
        couplers_local=local,
        interconnects=rails,
        breakdown=dict(tiers))
    rc.breakdown["qubits_memory"] = static
    return rc


def count_heterogeneous_raqm(spec: ArchitectureSpec) -> ResourceCounts:
    """Compute core + actively corrected memory joined by lattice surgery.

    Interconnect rails: n_bdry * d_bdry * (2 + n_buf + n_anc_pump), covering
    merge ancillas, Bell buffers, and pump ancillas.
    """
    qpu = spec.by_kind("QPU")[0]
    qsf = (spec.by_kind("QSF") or [None])[0]
    raqm = spec.by_kind("RAQM")[0]
    link = next(l for l in spec.links_of(raqm.id))
    bdry = derive_boundary(spec, link)
    d_qm = raqm.code.distance
    tiers = _qpu_tiers(qpu, qsf)
    tiers["qubits_memory"] = round(
        raqm.n_logical * (1 + raqm.code.c_anc) * d_qm * d_qm)
    rails = bdry.n_bdry * bdry.d_bdry * (2 + link.n_buf + link.n_anc_pump)
    tiers["qubits_interconnect"] = rails
    local = (2 * tiers["qubits_memory"] + 2 * tiers["qubits_logical"]
             + bdry.n_bdry * bdry.d_bdry)
    return ResourceCounts(
        qubits_active=sum(tiers.values()),
        couplers_local=local,
        interconnects=rails,
        breakdown=dict(tiers))


def count_rsa_architecture(spec: ArchitectureSpec) -> ResourceCounts:
    """Cryptanalysis-shaped plant: QPU cores + cache + optional LTS/ASQPU.

    Per-tier rows (d the QPU distance): QPU 2N d^2 qubits, 4N d^2 local
    couplers, 2N d Clifford routing, 2N(4d^2+2d) CCZ factories, cache
    interconnect (2N_qpu+N_cache) d^2; cache N_cache d^2 static plus one
    coupler each; surface LTS 2N d_lts^2 + 2N_tr d^2 (double for couplers);
    gross LTS 24N + 2N_tr d^2 qubits, 48N local + 24N non-local couplers;
    ASQPU 2N d^2 with its own rails and one 12-unit factory block.
    """
    qpu = spec.by_kind("QPU")[0]
    d = qpu.code.distance
    d2 = d * d
    bd: dict[str, int] = {}
    active = 0
    static = 0
    local = 0
    nonlocal_ = 0
    inter = 0

    n = qpu.n_logical
    bd["qubits_logical"] = 2 * n * d2
    bd["qubits_clifford"] = 2 * n * d
    bd["qubits_factory"] = 2 * n * (4 * d2 + 2 * d)
    active += bd["qubits_logical"] + bd["qubits_clifford"] + bd["qubits_factory"]
    local += 4 * n * d2

    caches = spec.by_kind("STQM")
    if caches:
        cache = caches[0]
        bd["qubits_cache"] = cache.n_logical * d2
        static += bd["qubits_cache"]
        local += cache.n_logical * d2
        bd["qubits_cache_interconnect"] = (2 * n + cache.n_logical) * d2
        active += bd["qubits_cache_interconnect"]
        inter += bd["qubits_cache_interconnect"]

    for raqm in spec.by_kind("RAQM"):
        n_tr = resolved_transfer_patches(raqm)
        if raqm.code.family == "gross":
            per_logical = GROSS_BLOCK_PHYSICAL // GROSS_BLOCK_LOGICAL
            bd["qubits_lts"] = per_logical * raqm.n_logical + 2 * n_tr * d2
            local += 2 * per_logical * raqm.n_logical + 4 * n_tr * d2
            nonlocal_ += per_logical * raqm.n_logical
            bd["qubits_lts_clifford"] = 0
        else:
            d_lts = raqm.code.distance
            bd["qubits_lts"] = (2 * raqm.n_logical * d_lts * d_lts
                                + 2 * n_tr * d2)
            local += (4 * raqm.n_logical * d_lts * d_lts + 4 * n_tr * d2)
            bd["qubits_lts_clifford"] = 2 * raqm.n_logical * d_lts
        active += bd["qubits_lts"] + bd["qubits_lts_clifford"]
        bd["qubits_lts_interconnect"] = n_tr * d2
        active += bd["qubits_lts_interconnect"]
        inter += bd["qubits_lts_interconnect"]

    for asqpu in spec.by_kind("ASQPU"):
        m = asqpu.n_logical
        da = asqpu.code.distance
        bd["qubits_asqpu"] = 2 * m * da * da
        bd["qubits_asqpu_factory"] = 12 * (4 * da * da + 2 * da)
        bd["qubits_asqpu_interconnect"] = m * da * da
        active += (bd["qubits_asqpu"] + bd["qubits_asqpu_factory"]
                   + bd["qubits_asqpu_interconnect"])
        local += 4 * m * da * da
        inter += bd["qubits_asqpu_interconnect"]

    return ResourceCounts(qubits_active=active, qubits_static=static,
                          couplers_local=local, couplers_nonlocal=nonlocal_,
                          interconnects=inter, breakdown=bd)


def count_architecture(spec: ArchitectureSpec) -> ResourceCounts:
    """Dispatch on module mix: factory state and memory tiers pick the family."""
    qsfs = spec.by_kind("QSF")
    has_ccz = any(m.state == "CCZ" for m in qsfs)
    stqm = spec.by_kind("STQM")
    raqm = spec.by_kind("RAQM")
    qpu = spec.by_kind("QPU")[0]
    if not stqm and not raqm:
        qsf = qsfs[0] if qsfs else None
        return count_homogeneous(
            qpu.n_logical, qpu.code.distance, qpu.code.c_anc,
            qpu.n_edges if qpu.n_edges is not None else 2 * qpu.n_logical,
            qsf.n_mf_per_qpu if qsf else 0.0, qsf.n_dist if qsf else 0)
    if has_ccz or spec.by_kind("ASQPU") or (stqm and raqm):
        return count_rsa_architecture(spec)
    if stqm:
        return count_heterogeneous_stqm(spec)
    return count_heterogeneous_raqm(spec)


# ------------------------------------------------- transfer-patch placement

def place_transfer_patches(n: int, k: int) -> int:
    """Patches needed so no stored qubit is more than ``k`` swaps away.

    Each patch serves itself plus the 2k^2+6k cells within k swaps of its
    2x2 footprint, hence ceil(n / (2k^2+6k+1)).
    """
    if n < 0 or k < 0:
        raise ValueError("n and k must be non-negative")
    if n == 0:
        return 0
    return math.ceil(n / (2 * k * k + 6 * k + 1))


def resolved_transfer_patches(raqm: ModuleSpec) -> int:
    """Module's explicit patch count, else the placement formula."""
    if raqm.n_transfer is not None:
        return raqm.n_transfer
    return place_transfer_patches(raqm.n_logical, raqm.k_swap)


@dataclass
class PatchLayout:
    """Concrete 2D placement; coordinates are memory-lattice cells."""

    k: int
    patch_cells: list[list[tuple[int, int]]]
    storage_cells: list[tuple[int, int]]
    storage_distances: list[int]

    @property
    def n_patches(self) -> int:
        return len(self.patch_cells)


def _lattice_points(count: int) -> list[tuple[int, int]]:
    pts: list[tuple[int, int]] = []
    ring = 0
    while len(pts) < count:
        ring_pts = sorted(
            (i, j)
            for i in range(-ring, ring + 1)
            for j in range(-ring, ring + 1)
            if max(abs(i), abs(j)) == ring)
        pts.extend(ring_pts)
        ring += 1
    return pts[:count]


def transfer_patch_layout(n: int, k: int) -> PatchLayout:
    """Placement achieving max swap distance <= k with the formula's count.

    Patches are 2x2 blocks anchored on the lattice spanned by (k+2, k+1)
    and (-(k+1), k+2); block separation is at least 2k+1, so the radius-k
    neighborhoods of distinct patches are disjoint and each patch fills its
    full quota of 2k^2+6k+1 slots (one on the patch itself).
    """
    m = place_transfer_patches(n, k)
    if k == 0:
        cells = [(i, 0) for i in range(n)]
        return PatchLayout(0, [[c] for c in cells], list(cells), [0] * n)
    quota = 2 * k * k + 6 * k + 1
    patches: list[list[tuple[int, int]]] = []
    storage: list[tuple[int, int]] = []
    dists: list[int] = []
    for (i, j) in _lattice_points(m):
        ax = i * (k + 2) - j * (k + 1)
        ay = i * (k + 1) + j * (k + 2)
        block = [(ax, ay), (ax + 1, ay), (ax, ay + 1), (ax + 1, ay + 1)]
        patches.append(block)
        if len(storage) >= n:
            continue
        storage.append((ax, ay))  # the patch stores one qubit itself
        dists.append(0)
        ring_cells = []
        for dx in range(-k, k + 2):
            for dy in range(-k, k + 2):
                cx, cy = ax + dx, ay + dy
                dist = _block_distance(cx, cy, ax, ay)
                if 1 <= dist <= k:
                    ring_cells.append((dist, cy, cx))
        ring_cells.sort()
        for dist, cy, cx in ring_cells[:quota - 1]:
            if len(storage) >= n:
                break
            storage.append((cx, cy))
            dists.append(dist)
    if len(storage) < n:
        raise AssertionError("placement under-filled; lattice packing broken")
    return PatchLayout(k, patches, storage, dists)


def _block_distance(x: int, y: int, ax: int, ay: int) -> int:
    dx = 0 if ax <= x <= ax + 1 else min(abs(x - ax), abs(x - ax - 1))
    dy = 0 if ay <= y <= ay + 1 else min(abs(y - ay), abs(y - ay - 1))
    return dx + dy


__all__ = [
    "ResourceCounts", "CostWeights", "space_cost", "count_homogeneous",
    "count_heterogeneous_stqm", "count_heterogeneous_raqm",
    "count_rsa_architecture", "count_architecture", "place_transfer_patches",
    "resolved_transfer_patches", "PatchLayout", "transfer_patch_layout",
]
