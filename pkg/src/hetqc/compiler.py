"""Compilation and scheduling of logical circuits onto an architecture.

Pipeline: lower the input gates to the device's native set, consolidate
them into unitary blocks, assign blocks to compute cores, then run a
deterministic in-order simulation per core.  Operands stream through core
slots; a cost router decides after every gate whether an operand stays
resident or moves to memory.  Writes do not block the core, reads do.

The per-lane rule: events that share a lane string never overlap in time.
Core lanes carry gates; a memory cell lane carries the write, the stored
dwell, any swap legs, and the read for one qubit, in that order.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

from .arch import ArchitectureSpec, LinkSpec, ModuleSpec, validate
from .circuits import GateOp, LogicalCircuit
from .qec import (TransferInfeasible, TransferParams, idle_error,
                  logical_error_per_cycle, stqm_storage_valid,
                  transfer_lattice_surgery, transfer_transversal)
from .resources import transfer_patch_layout

#: budget categories, in reporting order
CATEGORIES = ("qpu_idle", "qm_idle", "gate_1q", "gate_2q", "gate_t",
              "transfer", "measure")

EVENT_KINDS = frozenset({"gate", "t_inject", "ccz_inject", "transfer_write",
                         "transfer_read", "swap_route", "idle_buffer",
                         "qec_cycle_stretch"})

#: fixed factory block attached to an application-specific core
ASQPU_FACTORY_UNITS = 12

_FAR = 1 << 60


class CompileError(RuntimeError):
    """Raised when a circuit cannot be scheduled on an architecture."""


def rz_t_count(eps_magic: float) -> int:
    """T states for one synthesized rotation at the factory's output error."""
    if not 0 < eps_magic < 1:
        raise ValueError("eps_magic outside (0, 1)")
    return math.ceil(3 * math.log2(1 / eps_magic))


@dataclass(frozen=True, slots=True)
class ScheduledEvent:
    t_start_s: float
    duration_s: float
    kind: str
    module: str
    lane: str
    qubits: tuple[int, ...]
    label: str
    error: float
    category: str

    @property
    def t_end_s(self) -> float:
        return self.t_start_s + self.duration_s


@dataclass(frozen=True, slots=True)
class RouterDecision:
    t_s: float
    core: str
    qubit: int
    gap_cycles: int
    cost_keep: float
    cost_move: float
    moved: bool
    reason: str  # router | capacity | cross_core | terminal


@dataclass
class ScheduledProgram:
    circuit_name: str
    arch_name: str
    events: list[ScheduledEvent]
    makespan_s: float
    counters: dict[str, int]
    audit: list[RouterDecision]
    n_blocks: int
    warnings: list[str] = field(default_factory=list)

    def to_text(self) -> str:
        lines = [f"circuit {self.circuit_name} on {self.arch_name}",
                 f"makespan_s {self.makespan_s!r}",
                 " ".join(f"{k}={v}" for k, v in sorted(self.counters.items())),
                 "t_start_s duration_s kind module lane label qubits error"]
        for ev in self.events:
            qs = ",".join(str(q) for q in ev.qubits)
            lines.append(f"{ev.t_start_s!r} {ev.duration_s!r} {ev.kind} "
                         f"{ev.module} {ev.lane} {ev.label} {qs} {ev.error!r}")
        return "\n".join(lines) + "\n"


@dataclass
class ErrorBudget:
    """Total failure probability split over the seven fixed categories.

    Masses are log-domain shares of the total, so they stay additive no
    matter how many events each category holds and they sum to the total.
    """

    total: float
    categories: dict[str, float]

    @classmethod
    def from_events(cls, events) -> "ErrorBudget":
        parts: dict[str, list[float]] = {c: [] for c in CATEGORIES}
        for ev in events:
            if ev.error > 0.0:
                parts[ev.category].append(-math.log1p(-min(ev.error, 1 - 1e-16)))
        logs = {c: math.fsum(parts[c]) for c in CATEGORIES}
        log_total = math.fsum(logs.values())
        if log_total == 0.0:
            return cls(0.0, {c: 0.0 for c in CATEGORIES})
        total = -math.expm1(-log_total)
        return cls(total, {c: total * (logs[c] / log_total) for c in CATEGORIES})

    def rows(self) -> list[tuple[str, float]]:
        return [(c, self.categories[c]) for c in CATEGORIES]

    def dominant(self) -> str:
        return max(CATEGORIES, key=lambda c: self.categories[c])


def error_budget(program: ScheduledProgram) -> ErrorBudget:
    return ErrorBudget.from_events(program.events)


def synchronize_clocks(t_qm_s: float, t_qpu_s: float, t_min_s: float,
                       t_max_s: float) -> tuple[float, bool]:
    """Align a memory cycle to a whole number of compute cycles.

    Returns the effective memory cycle and a stretch flag.  The nearest
    multiple of ``t_qpu_s`` inside [t_min_s, t_max_s] wins, ties round up
    (50.5 us aligns to 51 us for a 1 us core).  When no multiple fits the
    window the nominal cycle is kept and the flag is set; the scheduler then
    pads each transfer to the next compute-cycle boundary.
    """
    if t_qm_s <= 0 or t_qpu_s <= 0:
        raise ValueError("cycle times must be positive")
    ratio = t_qm_s / t_qpu_s
    nearest = round(ratio)
    if nearest >= 1 and abs(ratio - nearest) < 1e-9:
        return nearest * t_qpu_s, False
    slack = 1e-9 * t_qpu_s
    cands = [n for n in (math.floor(ratio), math.floor(ratio) + 1)
             if n >= 1 and t_min_s - slack <= n * t_qpu_s <= t_max_s + slack]
    if not cands:
        return t_qm_s, True
    best = min(cands, key=lambda n: (abs(n * t_qpu_s - t_qm_s), -n))
    return best * t_qpu_s, False


# ------------------------------------------------------------- gate lowering

@dataclass(frozen=True, slots=True)
class LoweredGate:
    cost_key: str  # 1q | 2q | measure | t | rz | ccz | toffoli_t
    label: str
    qubits: tuple[int, ...]
    category: str
    magic: int = 0
    n_cnot: int = 0
    n_t: int = 0
    n_swap: int = 0
    tag: str | None = None
    src: int = -1


def _lower_op(op: GateOp, idx: int, factory_state: str | None,
              t_per_rz: int) -> list[LoweredGate]:
    def g(key, label, qubits, cat, **kw):
        return LoweredGate(key, label, qubits, cat, tag=op.tag, src=idx, **kw)

    k, q = op.kind, op.qubits
    if k in ("H", "S", "X", "Z", "Prep"):
        return [g("1q", k, q, "gate_1q")]
    if k in ("T", "Tdg"):
        return [g("t", k, q, "gate_t", magic=1, n_t=1)]
    if k == "Rz":
        return [g("rz", "Rz", q, "gate_t", magic=t_per_rz, n_t=t_per_rz)]
    if k in ("CNOT", "CZ"):
        return [g("2q", k, q, "gate_2q", n_cnot=1)]
    if k == "SWAP":
        a, b = q
        return [g("2q", "CNOT", (a, b), "gate_2q", n_cnot=1, n_swap=1),
                g("2q", "CNOT", (b, a), "gate_2q", n_cnot=1),
                g("2q", "CNOT", (a, b), "gate_2q", n_cnot=1)]
    if k == "CPhase":
        a, b = q
        return [g("rz", "Rz", (a,), "gate_t", magic=t_per_rz, n_t=t_per_rz),
                g("rz", "Rz", (b,), "gate_t", magic=t_per_rz, n_t=t_per_rz),
                g("2q", "CNOT", (a, b), "gate_2q", n_cnot=1),
                g("rz", "Rz", (b,), "gate_t", magic=t_per_rz, n_t=t_per_rz),
                g("2q", "CNOT", (a, b), "gate_2q", n_cnot=1)]
    if k in ("Toffoli", "CCZ"):
        a, b, c = q
        if factory_state == "CCZ":
            core = [g("ccz", "CCZ", (a, b, c), "gate_t", magic=1)]
            needs_basis_flip = k == "Toffoli"
        else:
            core = [g("toffoli_t", "Toffoli", (a, b, c), "gate_t",
                      magic=4, n_t=4, n_cnot=3)]
            needs_basis_flip = k == "CCZ"
        if needs_basis_flip:
            flip = g("1q", "H", (c,), "gate_1q")
            return [flip] + core + [flip]
        return core
    if k == "Measure":
        return [g("measure", "Measure", q, "measure")]
    raise CompileError(f"no lowering for gate kind {k!r}")


def lower_circuit(circuit: LogicalCircuit, factory_state: str | None,
                  eps_magic: float) -> list[LoweredGate]:
    """Translate circuit ops to device-native lowered gates, in order."""
    needs_magic = any(op.kind in ("T", "Tdg", "Rz", "CPhase", "Toffoli", "CCZ")
                      for op in circuit.ops)
    if needs_magic and factory_state is None:
        raise CompileError("circuit needs magic states but the architecture "
                           "has no factory module")
    t_per_rz = rz_t_count(eps_magic) if needs_magic else 0
    out: list[LoweredGate] = []
    for idx, op in enumerate(circuit.ops):
        out.extend(_lower_op(op, idx, factory_state, t_per_rz))
    return out


def _module_costs(module: ModuleSpec,
                  qsf: ModuleSpec | None) -> dict[str, tuple[int, float]]:
    """cost_key -> (cycles on this module, error per execution)."""
    d = module.code.distance
    eps = logical_error_per_cycle(module.modality.p_phys,
                                  module.modality.p_th, d)
    eps_2q = idle_error(eps, d)
    costs = {"1q": (1, eps), "2q": (d, eps_2q), "measure": (d, eps_2q)}
    if qsf is not None:
        inj = qsf.injection_cycles
        em = qsf.eps_magic
        n_rz = rz_t_count(em)
        costs["t"] = (inj, em)
        costs["rz"] = (n_rz * inj, -math.expm1(n_rz * math.log1p(-em)))
        costs["ccz"] = (inj, em)
        costs["toffoli_t"] = (
            4 * inj + 3 * d,
            -math.expm1(4 * math.log1p(-em) + 3 * math.log1p(-eps_2q)))
    return costs


# ------------------------------------------------------- block consolidation

@dataclass
class UnitaryBlock:
    index: int
    gates: list[int]
    qubits: set[int]
    tag: str | None
    deps: set[int] = field(default_factory=set)


def consolidate_blocks(lowered: list[LoweredGate],
                       max_qubits: int) -> list[UnitaryBlock]:
    """Group gates into tag-uniform blocks of bounded support.

    Earliest-fit: a gate joins the first block at or after its dependency
    frontier whose tag matches and whose support stays within the bound.
    """
    max_qubits = max(max_qubits,
                     max((len(g.qubits) for g in lowered), default=1))
    blocks: list[UnitaryBlock] = []
    last_touch: dict[int, int] = {}
    for gi, g in enumerate(lowered):
        frontier = max((last_touch.get(q, 0) for q in g.qubits), default=0)
        chosen = None
        for bi in range(frontier, len(blocks)):
            b = blocks[bi]
            if b.tag == g.tag and len(b.qubits | set(g.qubits)) <= max_qubits:
                chosen = b
                break
        if chosen is None:
            chosen = UnitaryBlock(len(blocks), [], set(), g.tag)
            blocks.append(chosen)
        chosen.gates.append(gi)
        chosen.qubits.update(g.qubits)
        for q in g.qubits:
            prev = last_touch.get(q)
            if prev is not None and prev != chosen.index:
                chosen.deps.add(prev)
            last_touch[q] = chosen.index
    return blocks


# ------------------------------------------------------------ runtime model

@dataclass
class _Core:
    module: ModuleSpec
    core_idx: int
    lane: str
    capacity: int
    costs: dict[str, tuple[int, float]]
    eps_cycle: float
    t_free: float = 0.0
    residents: dict[int, float] = field(default_factory=dict)  # q -> busy end
    incoming: dict[int, float] = field(default_factory=dict)   # q -> arrival
    stream: list[int] = field(default_factory=list)
    pos: int = 0
    prefix: list[int] = field(default_factory=list)            # cycles
    stream_pos: dict[int, int] = field(default_factory=dict)

    def slots_used(self) -> int:
        return len(self.residents) + len(self.incoming)


@dataclass
class _Memory:
    module: ModuleSpec
    links: dict[str, LinkSpec]             # compute module id -> link
    t_qm_eff: float
    stretched: bool
    eps_cycle: float | None                # None when storage is passive
    swap_dist: list[int]                   # per cell, all zero if k_swap == 0
    cells: dict[int, int] = field(default_factory=dict)         # qubit -> cell
    cell_ready: dict[int, float] = field(default_factory=dict)
    write_end: dict[int, float] = field(default_factory=dict)

    def full(self) -> bool:
        return len(self.cells) >= self.module.n_logical


class _Scheduler:
    def __init__(self, circuit: LogicalCircuit, arch: ArchitectureSpec):
        problems = circuit.validate() + validate(arch)
        if problems:
            raise CompileError("; ".join(problems))
        self.circuit = circuit
        self.arch = arch
        self.qpu = arch.by_kind("QPU")[0]
        qsfs = arch.by_kind("QSF")
        self.qsf = qsfs[0] if qsfs else None
        self.lowered = lower_circuit(
            circuit, self.qsf.state if self.qsf else None,
            self.qsf.eps_magic if self.qsf else 2.1e-9)
        self.t_qpu = self.qpu.t_cycle_s
        self.events: list[ScheduledEvent] = []
        self.audit: list[RouterDecision] = []
        self.warnings: list[str] = []
        self.counters = {"cnot_count": 0, "st_count": 0, "t_count": 0,
                         "swap_count": 0}
        self.cores = self._build_cores()
        self.memories = self._build_memories()
        self.pools = self._build_pools()
        self.blocks = consolidate_blocks(
            self.lowered, max(c.capacity for c in self.cores))
        self._assign_blocks()
        self.touches: dict[int, list[int]] = {}
        for gi, g in enumerate(self.lowered):
            for q in g.qubits:
                self.touches.setdefault(q, []).append(gi)
        self.core_of_gate: dict[int, _Core] = {}
        for core in self.cores:
            run = 0
            core.prefix = [0]
            for pos, gi in enumerate(core.stream):
                core.stream_pos[gi] = pos
                self.core_of_gate[gi] = core
                run += core.costs[self.lowered[gi].cost_key][0]
                core.prefix.append(run)
        self.q_mem: dict[int, _Memory] = {}
        self.q_core: dict[int, _Core] = {}
        self.born: set[int] = set()

    # -- construction ------------------------------------------------------

    def _build_cores(self) -> list[_Core]:
        cores = []
        for m in self.arch.compute_modules():
            costs = _module_costs(m, self.qsf)
            eps = logical_error_per_cycle(m.modality.p_phys,
                                          m.modality.p_th, m.code.distance)
            for ci in range(m.cores):
                cores.append(_Core(m, ci, f"{m.id}:core{ci}",
                                   m.capacity_per_core, costs, eps))
        # specialty cores first so an estimate tie dispatches to them
        cores.sort(key=lambda c: (c.module.specialty is None, c.module.id,
                                  c.core_idx))
        return cores

    def _build_memories(self) -> list[_Memory]:
        mems = []
        for m in self.arch.memory_modules():
            links = {}
            for link in self.arch.links_of(m.id):
                other = link.b if link.a == m.id else link.a
                links[other] = link
            if not links:
                continue
            if m.kind == "STQM":
                t_eff, stretched = m.t_cycle_s, False
                eps_cycle = None
            else:
                t_eff, stretched = synchronize_clocks(
                    m.t_cycle_s, self.t_qpu,
                    m.t_cycle_min_s if m.t_cycle_min_s is not None
                    else m.t_cycle_s,
                    m.t_cycle_max_s if m.t_cycle_max_s is not None
                    else m.t_cycle_s)
                eps_cycle = logical_error_per_cycle(
                    m.modality.p_phys, m.modality.p_th, m.code.distance)
            if m.k_swap > 0:
                layout = transfer_patch_layout(m.n_logical, m.k_swap)
                swap_dist = layout.storage_distances
            else:
                swap_dist = [0] * m.n_logical
            mems.append(_Memory(m, links, t_eff, stretched, eps_cycle,
                                swap_dist))
        # short-term memory is the preferred eviction target
        mems.sort(key=lambda mm: (mm.module.kind != "STQM", mm.module.id))
        return mems

    def _build_pools(self) -> dict[str, dict]:
        pools: dict[str, dict] = {}
        if self.qsf is not None:
            pools["shared"] = {"units": max(self.qsf.n_logical, 1),
                               "prod": self.qsf.production_cycles,
                               "t_cycle": self.qsf.t_cycle_s, "consumed": 0}
        for m in self.arch.by_kind("ASQPU"):
            pools[m.id] = {"units": ASQPU_FACTORY_UNITS,
                           "prod": 4 * m.code.distance,
                           "t_cycle": m.t_cycle_s, "consumed": 0}
        return pools

    def _pool_of(self, core: _Core) -> dict | None:
        if core.module.kind == "ASQPU" and core.module.id in self.pools:
            return self.pools[core.module.id]
        return self.pools.get("shared")

    def _assign_blocks(self) -> None:
        finish: dict[int, float] = {}
        free = {c.lane: 0.0 for c in self.cores}
        for b in self.blocks:
            best = None
            for core in self.cores:
                if core.module.kind == "ASQPU" \
                        and b.tag != core.module.specialty:
                    continue
                cyc = sum(core.costs[self.lowered[gi].cost_key][0]
                          for gi in b.gates)
                start = max([free[core.lane]] + [finish[d] for d in b.deps])
                est = start + cyc * core.module.t_cycle_s
                if best is None or est < best[0]:
                    best = (est, core)
            if best is None:
                raise CompileError(f"no eligible core for block {b.index}")
            est, core = best
            finish[b.index] = est
            free[core.lane] = est
            core.stream.extend(b.gates)

    # -- helpers -----------------------------------------------------------

    def _emit(self, *args) -> ScheduledEvent:
        ev = ScheduledEvent(*args)
        self.events.append(ev)
        return ev

    def _charge_idle(self, core: _Core, q: int, until: float) -> None:
        last = core.residents.get(q)
        if last is None or until <= last + 1e-15:
            return
        dur = until - last
        self._emit(last, dur, "idle_buffer", core.module.id,
                   f"{core.module.id}:q{q}", (q,), "resident_idle",
                   idle_error(core.eps_cycle, dur / core.module.t_cycle_s),
                   "qpu_idle")
        core.residents[q] = until

    def _prev_touch(self, q: int, gi: int) -> int | None:
        lst = self.touches[q]
        i = bisect_right(lst, gi - 1)
        return lst[i - 1] if i > 0 else None

    def _next_touch(self, q: int, after_gate: int) -> int | None:
        lst = self.touches[q]
        i = bisect_right(lst, after_gate)
        return lst[i] if i < len(lst) else None

    def _memory_for(self, q: int, core: _Core) -> _Memory:
        mem = self.q_mem.get(q)
        if mem is not None:
            return mem
        for mm in self.memories:
            if core.module.id in mm.links and not mm.full():
                mm.cells[q] = len(mm.cells)
                self.q_mem[q] = mm
                return mm
        raise CompileError(
            f"no reachable memory cell for qubit {q} from {core.lane}; "
            "compute capacity exhausted")

    def _probe_memory(self, q: int, core: _Core) -> _Memory | None:
        mem = self.q_mem.get(q)
        if mem is not None:
            return mem
        for mm in self.memories:
            if core.module.id in mm.links and not mm.full():
                return mm
        return None

    # transfer legs: physical transport inside the memory lattice before and
    # after the boundary hop, three memory CNOTs per swap step
    def _legs(self, mem: _Memory, q: int) -> tuple[int, float, float]:
        cell = mem.cells.get(q)
        dist = mem.swap_dist[cell] if cell is not None else 0
        if dist == 0 or mem.eps_cycle is None:
            return 0, 0.0, 0.0
        d_qm = mem.module.code.distance
        eps_cnot = idle_error(mem.eps_cycle, d_qm)
        err = -math.expm1(3 * dist * math.log1p(-eps_cnot))
        return dist, 3 * dist * d_qm * mem.t_qm_eff, err

    def _transfer(self, mem: _Memory, core: _Core, dwell_s: float,
                  reading: bool) -> tuple[float, float, float]:
        """(duration_s, hop_error, storage_error) for one boundary hop."""
        link = mem.links[core.module.id]
        if link.protocol == "transversal":
            d_qpu = core.module.code.distance
            bare = transfer_transversal(TransferParams(
                eps_qpu=core.eps_cycle, d_qpu=d_qpu,
                t_qpu_s=core.module.t_cycle_s,
                eps_th=core.module.modality.p_th, eps_tele=link.eps_tele))
            if not reading:
                return bare.duration_s, bare.error, 0.0
            if mem.eps_cycle is None:
                # passive store: the dwell's physical error rides through the
                # hop and is corrected on arrival; charge only the residue
                full = transfer_transversal(TransferParams(
                    eps_qpu=core.eps_cycle, d_qpu=d_qpu,
                    t_qpu_s=core.module.t_cycle_s,
                    eps_th=core.module.modality.p_th, eps_tele=link.eps_tele,
                    eps_eff_idle=dwell_s / mem.module.modality.t2_s))
                return (bare.duration_s, bare.error,
                        max(full.error - bare.error, 0.0))
            storage = idle_error(mem.eps_cycle, dwell_s / mem.t_qm_eff)
            return bare.duration_s, bare.error, storage
        res = transfer_lattice_surgery(TransferParams(
            eps_qpu=core.eps_cycle, d_qpu=core.module.code.distance,
            t_qpu_s=core.module.t_cycle_s, eps_qm=mem.eps_cycle or 0.0,
            d_qm=mem.module.code.distance, t_qm_s=mem.t_qm_eff))
        if not reading:
            return res.duration_s, res.error, 0.0
        storage = idle_error(mem.eps_cycle or 0.0, dwell_s / mem.t_qm_eff)
        return res.duration_s, res.error, storage

    def _move_cost(self, mem: _Memory, core: _Core, q: int,
                   dwell_s: float) -> float:
        try:
            _, w_err, _ = self._transfer(mem, core, 0.0, reading=False)
            _, r_err, s_err = self._transfer(mem, core, dwell_s, reading=True)
        except TransferInfeasible:
            return math.inf
        _, _, leg_err = self._legs(mem, q)
        return w_err + r_err + s_err + 2 * leg_err

    def _align(self, mem: _Memory, t: float) -> tuple[float, float]:
        """Round a transfer start up to a compute boundary when stretched."""
        if not mem.stretched:
            return t, 0.0
        n = math.ceil(t / self.t_qpu - 1e-9)
        return n * self.t_qpu, max(n * self.t_qpu - t, 0.0)

    # -- transfers ---------------------------------------------------------

    def _write_out(self, core: _Core, q: int, t: float, reason: str,
                   gap_cycles: int = 0, cost_keep: float = math.inf,
                   cost_move: float = 0.0) -> None:
        mem = self._memory_for(q, core)
        self._charge_idle(core, q, t)
        del core.residents[q]
        self.q_core.pop(q, None)
        cell_lane = f"{mem.module.id}:q{q}"
        t0, pad = self._align(mem, max(t, mem.cell_ready.get(q, 0.0)))
        if pad > 0:
            self._emit(t0 - pad, pad, "qec_cycle_stretch", core.module.id,
                       cell_lane, (q,), "clock_pad",
                       idle_error(core.eps_cycle,
                                  pad / core.module.t_cycle_s), "qpu_idle")
        dur, err, _ = self._transfer(mem, core, 0.0, reading=False)
        self._emit(t0, dur, "transfer_write", mem.module.id, cell_lane, (q,),
                   "write", err, "transfer")
        self.counters["st_count"] += 1
        t_cell = t0 + dur
        dist, leg_dur, leg_err = self._legs(mem, q)
        if dist:
            self._emit(t_cell, leg_dur, "swap_route", mem.module.id,
                       cell_lane, (q,), f"legs_in:{dist}", leg_err, "qm_idle")
            self.counters["swap_count"] += dist
            t_cell += leg_dur
        mem.write_end[q] = t_cell
        mem.cell_ready[q] = t_cell
        self.audit.append(RouterDecision(t, core.lane, q, gap_cycles,
                                         cost_keep, cost_move, True, reason))

    def _read_in(self, core: _Core, q: int, t_issue: float,
                 target_s: float | None = None) -> float:
        """Start the read no earlier than t_issue; returns arrival time.

        With a target the read is issued just in time for the patch to
        arrive then, so the dwell stays in the cell instead of turning
        into compute-side idle.
        """
        mem = self.q_mem[q]
        cell_lane = f"{mem.module.id}:q{q}"
        t0 = max(t_issue, mem.cell_ready[q])
        if target_s is not None:
            hop_dur, _, _ = self._transfer(mem, core, 0.0, reading=True)
            _, leg_dur, _ = self._legs(mem, q)
            t0 = max(t0, target_s - hop_dur - leg_dur)
        dwell = max(t0 - mem.write_end[q], 0.0)
        if mem.eps_cycle is None and not stqm_storage_valid(
                mem.module.modality, dwell, core.module.modality.p_phys):
            self.warnings.append(
                f"qubit {q}: stored {dwell:.3e} s, beyond the consumer's "
                f"physical rate {core.module.modality.p_phys}")
        dur, err, storage_err = self._transfer(mem, core, dwell, reading=True)
        if dwell > 0 or storage_err > 0:
            self._emit(mem.write_end[q], dwell, "idle_buffer", mem.module.id,
                       cell_lane, (q,), "stored", storage_err, "qm_idle")
        t_legs = t0
        dist, leg_dur, leg_err = self._legs(mem, q)
        if dist:
            self._emit(t_legs, leg_dur, "swap_route", mem.module.id,
                       cell_lane, (q,), f"legs_out:{dist}", leg_err,
                       "qm_idle")
            self.counters["swap_count"] += dist
            t_legs += leg_dur
        t_read, pad = self._align(mem, t_legs)
        if pad > 0:
            self._emit(t_legs, pad, "qec_cycle_stretch", core.module.id,
                       cell_lane, (q,), "clock_pad",
                       idle_error(core.eps_cycle,
                                  pad / core.module.t_cycle_s), "qpu_idle")
        self._emit(t_read, dur, "transfer_read", mem.module.id, cell_lane,
                   (q,), "read", err, "transfer")
        self.counters["st_count"] += 1
        mem.cell_ready[q] = t_read + dur
        del mem.write_end[q]
        core.incoming[q] = t_read + dur
        return t_read + dur

    def _force_slot(self, core: _Core, t: float, protected: set[int]) -> None:
        victims = [q for q in core.residents if q not in protected]
        if not victims:
            raise CompileError(f"core {core.lane} has no evictable slot "
                               f"(capacity {core.capacity})")
        gate_now = (core.stream[core.pos] if core.pos < len(core.stream)
                    else _FAR)

        def farness(q: int):
            nxt = self._next_touch(q, gate_now)
            return (-(nxt if nxt is not None else _FAR), q)

        victim = min(victims, key=farness)
        self._write_out(core, victim, max(t, core.residents[victim]),
                        "capacity")

    def _ensure_operand(self, core: _Core, q: int, t_issue: float) -> float:
        """Make q available on this core; returns its ready time."""
        if q in core.residents:
            return core.residents[q]
        if q in core.incoming:
            return core.incoming[q]
        owner = self.q_core.get(q)
        if owner is not None and owner is not core:
            self._write_out(owner, q, max(t_issue, owner.residents[q]),
                            "cross_core")
        protected = (set(self.lowered[core.stream[core.pos]].qubits)
                     if core.pos < len(core.stream) else set())
        while core.slots_used() >= core.capacity:
            self._force_slot(core, t_issue, protected)
        mem = self.q_mem.get(q)
        if mem is not None and q in mem.write_end:
            return self._read_in(core, q, t_issue)
        # first touch: the patch is prepared directly in a compute slot
        self.born.add(q)
        core.residents[q] = t_issue
        self.q_core[q] = core
        return t_issue

    # -- main loop ---------------------------------------------------------

    def run(self) -> ScheduledProgram:
        scheduled: set[int] = set()
        done = 0
        total = len(self.lowered)
        while done < total:
            progress = False
            for core in self.cores:
                while core.pos < len(core.stream):
                    gi = core.stream[core.pos]
                    g = self.lowered[gi]
                    blocked = False
                    for q in g.qubits:
                        prev = self._prev_touch(q, gi)
                        if prev is not None and prev not in scheduled:
                            blocked = True
                            break
                    if blocked:
                        break
                    self._execute(core, gi, g)
                    scheduled.add(gi)
                    core.pos += 1
                    done += 1
                    progress = True
            if not progress:
                raise CompileError("scheduler stalled on a dependency cycle")
        makespan = max((ev.t_end_s for ev in self.events), default=0.0)
        for core in self.cores:
            for q in sorted(core.residents):
                self._charge_idle(core, q, makespan)
        self._terminal_storage(makespan)
        makespan = max((ev.t_end_s for ev in self.events), default=0.0)
        self.events.sort(key=lambda ev: (ev.t_start_s, ev.module, ev.lane,
                                         ev.kind, ev.qubits))
        return ScheduledProgram(self.circuit.name, self.arch.name,
                                self.events, makespan, self.counters,
                                self.audit, len(self.blocks), self.warnings)

    def _execute(self, core: _Core, gi: int, g: LoweredGate) -> None:
        if len(g.qubits) > core.capacity:
            raise CompileError(
                f"gate {g.label} needs {len(g.qubits)} slots, core "
                f"{core.lane} holds {core.capacity}")
        t_issue = core.t_free
        ready = [self._ensure_operand(core, q, t_issue) for q in g.qubits]
        cycles, err = core.costs[g.cost_key]
        start = max([core.t_free] + ready)
        if g.magic:
            pool = self._pool_of(core)
            if pool is not None:
                pool["consumed"] += g.magic
                start = max(start, pool["consumed"] * pool["prod"]
                            * pool["t_cycle"] / pool["units"])
        for q in g.qubits:
            arrival = core.incoming.pop(q, None)
            if arrival is not None:
                core.residents[q] = arrival
                self.q_core[q] = core
            self._charge_idle(core, q, start)
        dur = cycles * core.module.t_cycle_s
        kind = {"t": "t_inject", "rz": "t_inject", "toffoli_t": "t_inject",
                "ccz": "ccz_inject"}.get(g.cost_key, "gate")
        self._emit(start, dur, kind, core.module.id, core.lane, g.qubits,
                   g.label, err, g.category)
        self.counters["cnot_count"] += g.n_cnot
        self.counters["t_count"] += g.n_t
        self.counters["swap_count"] += g.n_swap
        core.t_free = start + dur
        for q in g.qubits:
            core.residents[q] = start + dur
        self._prefetch(core, start)
        self._route(core, gi, g, start + dur)

    def _prefetch(self, core: _Core, t_now: float) -> None:
        nxt = core.pos + 1
        if nxt >= len(core.stream):
            return
        for q in self.lowered[core.stream[nxt]].qubits:
            if (q in core.residents or q in core.incoming
                    or core.slots_used() >= core.capacity
                    or self.q_core.get(q) is not None):
                continue
            mem = self.q_mem.get(q)
            if mem is not None and q in mem.write_end:
                self._read_in(core, q, t_now, target_s=core.t_free)

    def _route(self, core: _Core, gi: int, g: LoweredGate,
               t_end: float) -> None:
        for q in g.qubits:
            if q not in core.residents:
                continue
            nxt = self._next_touch(q, gi)
            if nxt is None:
                if g.cost_key == "measure":
                    # measured out: the slot is simply released
                    del core.residents[q]
                    self.q_core.pop(q, None)
                elif any(core.module.id in mm.links for mm in self.memories):
                    self._write_out(core, q, t_end, "terminal")
                continue
            if self.core_of_gate[nxt] is not core:
                if any(core.module.id in mm.links for mm in self.memories):
                    self._write_out(core, q, t_end, "cross_core")
                continue
            gap = (core.prefix[core.stream_pos[nxt]]
                   - core.prefix[core.stream_pos[gi] + 1])
            if gap <= 0:
                continue
            mem = self._probe_memory(q, core)
            if mem is None:
                continue
            cost_keep = idle_error(core.eps_cycle, gap)
            cost_move = self._move_cost(mem, core, q,
                                        gap * core.module.t_cycle_s)
            if cost_move < cost_keep:
                self._write_out(core, q, t_end, "router", gap, cost_keep,
                                cost_move)
            else:
                self.audit.append(RouterDecision(t_end, core.lane, q, gap,
                                                 cost_keep, cost_move,
                                                 False, "router"))

    def _terminal_storage(self, makespan: float) -> None:
        for mem in self.memories:
            consumer = next(
                (c for c in self.cores
                 if c.module.kind == "QPU" and c.module.id in mem.links),
                next((c for c in self.cores if c.module.id in mem.links),
                     self.cores[0]))
            for q, t0 in sorted(mem.write_end.items()):
                dwell = makespan - t0
                if dwell <= 0:
                    continue
                if mem.eps_cycle is None:
                    try:
                        _, _, err = self._transfer(mem, consumer, dwell,
                                                   reading=True)
                    except TransferInfeasible:
                        err = 1.0 - 1e-16
                        self.warnings.append(
                            f"qubit {q}: terminal dwell {dwell:.3e} s "
                            "exceeds the recoverable storage window")
                else:
                    err = idle_error(mem.eps_cycle, dwell / mem.t_qm_eff)
                self._emit(t0, dwell, "idle_buffer", mem.module.id,
                           f"{mem.module.id}:q{q}", (q,), "stored", err,
                           "qm_idle")


def schedule(circuit: LogicalCircuit,
             arch: ArchitectureSpec) -> ScheduledProgram:
    """Compile and schedule a circuit; deterministic for identical inputs."""
    return _Scheduler(circuit, arch).run()


# ------------------------------------------------------------ baseline path

def schedule_baseline(circuit: LogicalCircuit,
                      arch: ArchitectureSpec) -> ScheduledProgram:
    """Monolithic reference: square grid, persistent map, swap routing.

    Gates run as one serial stream; every mapped qubit is charged idle error
    over the whole makespan outside its own gate time.
    """
    problems = circuit.validate() + validate(arch)
    if problems:
        raise CompileError("; ".join(problems))
    qpu = arch.by_kind("QPU")[0]
    if circuit.n_qubits > qpu.n_logical:
        raise CompileError(f"{circuit.n_qubits} qubits exceed the device's "
                           f"{qpu.n_logical}")
    qsfs = arch.by_kind("QSF")
    qsf = qsfs[0] if qsfs else None
    lowered = lower_circuit(circuit, qsf.state if qsf else None,
                            qsf.eps_magic if qsf else 2.1e-9)
    costs = _module_costs(qpu, qsf)
    eps = logical_error_per_cycle(qpu.modality.p_phys, qpu.modality.p_th,
                                  qpu.code.distance)
    t_cyc = qpu.t_cycle_s
    n = circuit.n_qubits
    side = math.isqrt(n - 1) + 1 if n else 1
    pos = {q: (q // side, q % side) for q in range(n)}
    cell = {p: q for q, p in pos.items()}
    events: list[ScheduledEvent] = []
    counters = {"cnot_count": 0, "st_count": 0, "t_count": 0, "swap_count": 0}
    busy = {q: 0.0 for q in range(n)}
    lane = f"{qpu.id}:core0"
    t = 0.0
    consumed = 0
    swap_cycles = 3 * qpu.code.distance
    swap_err = -math.expm1(3 * math.log1p(-costs["2q"][1]))

    def do_swap(a_pos, b_pos):
        nonlocal t
        qa, qb = cell.get(a_pos), cell.get(b_pos)
        moved = tuple(q for q in (qa, qb) if q is not None)
        events.append(ScheduledEvent(t, swap_cycles * t_cyc, "swap_route",
                                     qpu.id, lane, moved, "swap", swap_err,
                                     "gate_2q"))
        counters["swap_count"] += 1
        counters["cnot_count"] += 3
        for q in moved:
            busy[q] += swap_cycles * t_cyc
        cell.pop(a_pos, None)
        cell.pop(b_pos, None)
        if qa is not None:
            pos[qa] = b_pos
            cell[b_pos] = qa
        if qb is not None:
            pos[qb] = a_pos
            cell[a_pos] = qb
        t += swap_cycles * t_cyc

    def route(mover: int, anchor: int, stop_dist: int,
              avoid: set[int]) -> None:
        steps_left = 4 * side * side
        while True:
            (mr, mc), (ar, ac) = pos[mover], pos[anchor]
            if abs(mr - ar) + abs(mc - ac) <= stop_dist:
                return
            steps_left -= 1
            if steps_left < 0:
                raise CompileError("grid routing failed to converge")
            cands = []
            if mr != ar:
                cands.append((mr + (1 if ar > mr else -1), mc))
            if mc != ac:
                cands.append((mr, mc + (1 if ac > mc else -1)))
            for nxt in cands:
                occupant = cell.get(nxt)
                if occupant == anchor or occupant in avoid:
                    continue
                do_swap(pos[mover], nxt)
                break
            else:  # both forward steps blocked by protected patches
                detour_r = mr + (1 if mr < side - 1 else -1)
                do_swap(pos[mover], (detour_r, mc))

    for g in lowered:
        if len(g.qubits) >= 2:
            anchor = g.qubits[0]
            placed = {anchor}
            for extra, stop in zip(g.qubits[1:], (1, 2)):
                route(extra, anchor, stop, placed)
                placed.add(extra)
        cycles, err = costs[g.cost_key]
        if g.magic and qsf is not None:
            consumed += g.magic
            t = max(t, consumed * qsf.production_cycles * qsf.t_cycle_s
                    / max(qsf.n_logical, 1))
        dur = cycles * t_cyc
        kind = {"t": "t_inject", "rz": "t_inject", "toffoli_t": "t_inject",
                "ccz": "ccz_inject"}.get(g.cost_key, "gate")
        events.append(ScheduledEvent(t, dur, kind, qpu.id, lane, g.qubits,
                                     g.label, err, g.category))
        counters["cnot_count"] += g.n_cnot
        counters["t_count"] += g.n_t
        counters["swap_count"] += g.n_swap
        for q in g.qubits:
            busy[q] += dur
        t += dur

    makespan = t
    for q in range(n):
        dur = makespan - busy[q]
        if dur <= 0:
            continue
        events.append(ScheduledEvent(0.0, dur, "idle_buffer", qpu.id,
                                     f"{qpu.id}:q{q}", (q,), "mapped_idle",
                                     idle_error(eps, dur / t_cyc),
                                     "qpu_idle"))
    events.sort(key=lambda ev: (ev.t_start_s, ev.module, ev.lane, ev.kind,
                                ev.qubits))
    return ScheduledProgram(circuit.name, arch.name, events, makespan,
                            counters, [], 1, [])


__all__ = [
    "CATEGORIES", "EVENT_KINDS", "ASQPU_FACTORY_UNITS", "CompileError",
    "rz_t_count", "ScheduledEvent", "RouterDecision", "ScheduledProgram",
    "ErrorBudget", "error_budget", "synchronize_clocks", "LoweredGate",
    "lower_circuit", "UnitaryBlock", "consolidate_blocks", "schedule",
    "schedule_baseline",
]
