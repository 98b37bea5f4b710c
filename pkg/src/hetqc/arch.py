"""Architecture model: modules, links, builtins, config file I/O.

An architecture is a set of modules (compute cores, magic-state factories,
quantum memories) joined by interconnect links.  Module kinds:

* ``QPU``    surface-code compute core(s)
* ``ASQPU``  application-specific compute core, matched to block tags
* ``QSF``    magic-state factory tier (T or CCZ)
* ``STQM``   short-term memory, stores encoded patches without active QEC
* ``RAQM``   random-access memory with active QEC and its own clock
* ``QB``     Bell-pair buffer (operational bus parameters live on links)

Configs are sectioned key-value text; builtins round-trip bit-exactly.
"""

from __future__ import annotations

import configparser
import io
from dataclasses import dataclass, field, replace

MODULE_KINDS = frozenset({"QPU", "QSF", "ASQPU", "STQM", "RAQM", "QB"})
LINK_PROTOCOLS = frozenset({"transversal", "lattice_surgery"})
CODE_FAMILIES = frozenset({"surface", "gross", "none"})

#: physical qubits and logical capacity of one gross-code block
GROSS_BLOCK_PHYSICAL = 288  # 144 data + 144 check
GROSS_BLOCK_LOGICAL = 12


class ConfigError(ValueError):
    """Raised for unparseable or structurally invalid config input."""


@dataclass(frozen=True)
class CodeSpec:
    family: str
    distance: int
    c_anc: float = 1.0


@dataclass(frozen=True)
class ModalitySpec:
    """Hardware platform parameters shared by a module's qubits."""

    name: str
    p_phys: float
    p_th: float
    t1_s: float
    t2_s: float


@dataclass
class ModuleSpec:
    id: str
    kind: str
    n_logical: int
    code: CodeSpec
    modality: ModalitySpec
    t_cycle_s: float
    t_cycle_min_s: float | None = None
    t_cycle_max_s: float | None = None
    cores: int = 1
    n_edges: int | None = None
    specialty: str | None = None
    active_qec: bool = True
    # factory tier (QSF)
    state: str | None = None
    n_dist: int = 0
    n_mf_per_qpu: float = 0.0
    production_cycles: int = 0
    injection_cycles: int = 0
    eps_magic: float = 0.0
    # memory tier (RAQM)
    k_swap: int = 0
    n_transfer: int | None = None
    transfer_distance: int | None = None

    @property
    def capacity_per_core(self) -> int:
        return self.n_logical // max(self.cores, 1)


@dataclass
class LinkSpec:
    """Interconnect between two modules, first id is the compute side."""

    a: str
    b: str
    protocol: str
    eps_tele: float = 1e-4
    bell_rate_hz: float = 1e8
    bell_eps: float = 1e-3
    n_buf: int = 2
    n_anc_pump: int = 1


@dataclass
class ArchitectureSpec:
    name: str
    modules: list[ModuleSpec] = field(default_factory=list)
    links: list[LinkSpec] = field(default_factory=list)

    def module(self, module_id: str) -> ModuleSpec:
        for m in self.modules:
            if m.id == module_id:
                return m
        raise KeyError(f"no module {module_id!r} in {self.name}")

    def by_kind(self, kind: str) -> list[ModuleSpec]:
        return [m for m in self.modules if m.kind == kind]

    def compute_modules(self) -> list[ModuleSpec]:
        return [m for m in self.modules if m.kind in ("QPU", "ASQPU")]

    def memory_modules(self) -> list[ModuleSpec]:
        return [m for m in self.modules if m.kind in ("STQM", "RAQM")]

    def links_of(self, module_id: str) -> list[LinkSpec]:
        return [l for l in self.links if module_id in (l.a, l.b)]


@dataclass(frozen=True)
class Boundary:
    """Derived interconnect geometry for one compute-memory link."""

    n_bdry: int
    d_bdry: int
    d_time: int


def derive_boundary(spec: ArchitectureSpec, link: LinkSpec | None = None) -> Boundary:
    """Boundary rail count and merged distances for ``link``.

    Rails: one per memory patch plus two per compute patch.  Defaults to the
    first compute-memory link of the architecture.
    """
    if link is None:
        for cand in spec.links:
            pair = {spec.module(cand.a).kind, spec.module(cand.b).kind}
            if pair & {"QPU", "ASQPU"} and pair & {"STQM", "RAQM"}:
                link = cand
                break
        else:
            raise ConfigError(f"{spec.name}: no compute-memory link")
    ma, mb = spec.module(link.a), spec.module(link.b)
    if ma.kind in ("STQM", "RAQM"):
        ma, mb = mb, ma
    n_bdry = mb.n_logical + 2 * ma.n_logical
    d_bdry = min(ma.code.distance, mb.code.distance)
    d_time = max(ma.code.distance, mb.code.distance)
    return Boundary(n_bdry, d_bdry, d_time)


def validate(spec: ArchitectureSpec) -> list[str]:
    """Structural diagnostics; an empty list means the architecture is usable."""
    out: list[str] = []
    seen: set[str] = set()
    for m in spec.modules:
        where = f"module {m.id}"
        if m.id in seen:
            out.append(f"{where}: duplicate id")
        seen.add(m.id)
        if m.kind not in MODULE_KINDS:
            out.append(f"{where}: unknown kind {m.kind!r}")
        if m.n_logical < 0 or (m.kind in ("QPU", "ASQPU", "STQM", "RAQM")
                               and m.n_logical < 1):
            out.append(f"{where}: needs at least one logical qubit")
        if m.code.family not in CODE_FAMILIES:
            out.append(f"{where}: unknown code family {m.code.family!r}")
        if m.code.family == "surface" and (m.code.distance < 3
                                           or m.code.distance % 2 == 0):
            out.append(f"{where}: surface distance must be odd and >= 3")
        if m.code.c_anc < 0:
            out.append(f"{where}: negative ancilla fraction")
        if not 0 <= m.modality.p_phys < m.modality.p_th:
            out.append(f"{where}: p_phys {m.modality.p_phys} not below "
                       f"threshold {m.modality.p_th}")
        if m.modality.t2_s > 2 * m.modality.t1_s:
            out.append(f"{where}: T2 exceeds 2*T1")
        if m.t_cycle_s <= 0:
            out.append(f"{where}: non-positive cycle time")
        if m.t_cycle_min_s is not None and m.t_cycle_max_s is not None:
            if m.t_cycle_min_s > m.t_cycle_max_s:
                out.append(f"{where}: cycle-time range inverted")
            elif not m.t_cycle_min_s <= m.t_cycle_s <= m.t_cycle_max_s:
                out.append(f"{where}: nominal cycle outside range")
        if m.kind in ("QPU", "ASQPU"):
            if m.cores < 1:
                out.append(f"{where}: needs at least one core")
            elif m.n_logical % m.cores:
                out.append(f"{where}: {m.n_logical} qubits not divisible "
                           f"into {m.cores} cores")
        if m.kind == "QSF":
            if m.state not in ("T", "CCZ"):
                out.append(f"{where}: factory state must be T or CCZ")
            if m.n_dist < 1:
                out.append(f"{where}: n_dist must be >= 1")
            if m.injection_cycles < 1 or m.production_cycles < 1:
                out.append(f"{where}: injection/production cycles must be >= 1")
            if not 0 < m.eps_magic < 1:
                out.append(f"{where}: eps_magic outside (0, 1)")
        if m.kind == "RAQM" and m.k_swap < 0:
            out.append(f"{where}: negative swap distance")
        if m.kind == "STQM" and m.active_qec:
            out.append(f"{where}: short-term memory stores passively; "
                       "set active_qec = false")
    ids = {m.id for m in spec.modules}
    for l in spec.links:
        where = f"link {l.a}-{l.b}"
        for end in (l.a, l.b):
            if end not in ids:
                out.append(f"{where}: unknown module {end!r}")
        if l.protocol not in LINK_PROTOCOLS:
            out.append(f"{where}: unknown protocol {l.protocol!r}")
            continue
        if l.a in ids and l.b in ids:
            kinds = {spec.module(l.a).kind, spec.module(l.b).kind}
            if "STQM" in kinds and l.protocol != "transversal":
                out.append(f"{where}: short-term memory links must use the "
                           "transversal protocol")
        if l.n_anc_pump not in (1, 2):
            out.append(f"{where}: n_anc_pump must be 1 or 2")
        if l.n_buf < 0:
            out.append(f"{where}: negative buffer depth")
        if not 0 <= l.eps_tele < 1 or not 0 <= l.bell_eps < 1:
            out.append(f"{where}: link error rates outside [0, 1)")
        if l.bell_rate_hz <= 0:
            out.append(f"{where}: Bell rate must be positive")
    if not any(m.kind == "QPU" for m in spec.modules):
        out.append("architecture has no QPU module")
    return out


# ---------------------------------------------------------------- builtins

SC_TRANSMON = ModalitySpec("sc_transmon", p_phys=5e-4, p_th=6e-3,
                           t1_s=1e-4, t2_s=1e-4)
ULC_REI = ModalitySpec("ulc_rei", p_phys=1e-10, p_th=0.2,
                       t1_s=1.98e6, t2_s=3.6e4)
NA_LC = ModalitySpec("na_lc", p_phys=1e-4, p_th=6e-3, t1_s=100.0, t2_s=100.0)
PHOTONIC = ModalitySpec("photonic", p_phys=1e-3, p_th=1e-2, t1_s=1.0, t2_s=1.0)

MODALITIES = {m.name: m for m in (SC_TRANSMON, ULC_REI, NA_LC, PHOTONIC)}

BUILTIN_NAMES = ("baseline1000", "A1", "A2", "A3", "Mono",
                 "B1", "B2", "B3", "B4", "B5", "B6")


def _qpu(n: int, d: int, cores: int = 1, n_edges: int | None = None) -> ModuleSpec:
    return ModuleSpec("qpu0", "QPU", n, CodeSpec("surface", d), SC_TRANSMON,
                      1e-6, cores=cores,
                      n_edges=n_edges if n_edges is not None else n)


def _t_factory(n_qpu: int, d: int, per_qpu: float = 3.0) -> ModuleSpec:
    return ModuleSpec("qsf0", "QSF", round(per_qpu * n_qpu),
                      CodeSpec("surface", d), PHOTONIC, 1e-6,
                      state="T", n_dist=72, n_mf_per_qpu=per_qpu,
                      production_cycles=4 * d, injection_cycles=2 * d,
                      eps_magic=2.1e-9)


def _ccz_factory(n_qpu: int, d: int, per_qpu: float = 0.67) -> ModuleSpec:
    return ModuleSpec("qsf0", "QSF", max(round(per_qpu * n_qpu), 1),
                      CodeSpec("surface", d), PHOTONIC, 1e-6,
                      state="CCZ", n_dist=12, n_mf_per_qpu=per_qpu,
                      production_cycles=4 * d, injection_cycles=2 * d,
                      eps_magic=2.1e-9)


def _stqm(n: int, d: int, module_id: str = "stqm0") -> ModuleSpec:
    return ModuleSpec(module_id, "STQM", n, CodeSpec("surface", d), ULC_REI,
                      1e-6, active_qec=False)


def _raqm(n: int, code: CodeSpec, t_cycle: float, k_swap: int = 0,
          n_transfer: int | None = None,
          transfer_distance: int | None = None) -> ModuleSpec:
    return ModuleSpec("raqm0", "RAQM", n, code, NA_LC, t_cycle,
                      t_cycle_min_s=5e-5, t_cycle_max_s=1e-3, k_swap=k_swap,
                      n_transfer=n_transfer, transfer_distance=transfer_distance)


def builtin_architecture(name: str) -> ArchitectureSpec:
    """Fresh instance of a named builtin; raises ConfigError for unknown names."""
    if name == "baseline1000":
        return ArchitectureSpec(name, [
            _qpu(1000, 15, n_edges=2000),
            _t_factory(1000, 15),
        ])
    if name == "A1":
        return ArchitectureSpec(name, [
            _qpu(3, 15), _t_factory(3, 15), _stqm(1000, 15),
        ], [LinkSpec("qpu0", "stqm0", "transversal")])
    if name in ("A2", "A3"):
        t_qm = 5e-5 if name == "A2" else 1e-3
        return ArchitectureSpec(name, [
            _qpu(3, 15), _t_factory(3, 15),
            _raqm(1000, CodeSpec("surface", 9), t_qm),
        ], [LinkSpec("qpu0", "raqm0", "lattice_surgery")])
    if name == "Mono":
        return ArchitectureSpec(name, [
            _qpu(1399, 25, n_edges=2798),
            _ccz_factory(1399, 25, per_qpu=12 / 1399),
        ])
    if name in ("B1", "B2", "B3", "B4", "B5", "B6"):
        cache_n = 1399 if name in ("B1", "B4") else 145
        modules = [
            _qpu(6, 19, cores=2, n_edges=6),
            _ccz_factory(6, 19),
            _stqm(cache_n, 19, "cache0"),
        ]
        links = [LinkSpec("qpu0", "cache0", "transversal")]
        if name in ("B2", "B5"):
            modules.append(_raqm(1254, CodeSpec("surface", 9), 1e-3,
                                 k_swap=4, n_transfer=22, transfer_distance=19))
            links.append(LinkSpec("qpu0", "raqm0", "transversal"))
        elif name in ("B3", "B6"):
            modules.append(_raqm(1260, CodeSpec("gross", 12), 1e-3,
                                 k_swap=4, n_transfer=26, transfer_distance=19))
            links.append(LinkSpec("qpu0", "raqm0", "transversal"))
        if name in ("B4", "B5", "B6"):
            modules.append(ModuleSpec(
                "asqpu0", "ASQPU", 37, CodeSpec("surface", 19), SC_TRANSMON,
                1e-6, n_edges=37, specialty="adder"))
            links.append(LinkSpec("asqpu0", "cache0", "transversal"))
        return ArchitectureSpec(name, modules, links)
    raise ConfigError(f"unknown builtin architecture {name!r}")


# ------------------------------------------------------------- config I/O

_T = {"int": int, "float": float, "str": str}


def _parse_bool(text: str) -> bool:
    if text.lower() in ("true", "yes", "1"):
        return True
    if text.lower() in ("false", "no", "0"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_T["bool"] = _parse_bool

#: (config key, ModuleSpec attribute, type name, emit when != this default)
_MODULE_FIELDS = (
    ("kind", "kind", "str", None),
    ("logical_qubits", "n_logical", "int", None),
    ("cores", "cores", "int", 1),
    ("edges", "n_edges", "int", None),
    ("specialty", "specialty", "str", None),
    ("code_family", None, "str", None),
    ("code_distance", None, "int", None),
    ("code_anc_fraction", None, "float", None),
    ("modality", None, "str", None),
    ("p_phys", None, "float", None),
    ("p_th", None, "float", None),
    ("t1_s", None, "float", None),
    ("t2_s", None, "float", None),
    ("t_cycle_s", "t_cycle_s", "float", None),
    ("t_cycle_min_s", "t_cycle_min_s", "float", None),
    ("t_cycle_max_s", "t_cycle_max_s", "float", None),
    ("active_qec", "active_qec", "bool", True),
    ("state", "state", "str", None),
    ("n_dist", "n_dist", "int", 0),
    ("n_mf_per_qpu", "n_mf_per_qpu", "float", 0.0),
    ("production_cycles", "production_cycles", "int", 0),
    ("injection_cycles", "injection_cycles", "int", 0),
    ("eps_magic", "eps_magic", "float", 0.0),
    ("k_swap", "k_swap", "int", 0),
    ("n_transfer", "n_transfer", "int", None),
    ("transfer_distance", "transfer_distance", "int", None),
)

_LINK_FIELDS = (
    ("protocol", "str"),
    ("eps_tele", "float"),
    ("bell_rate_hz", "float"),
    ("bell_eps", "float"),
    ("n_buf", "int"),
    ("n_anc_pump", "int"),
)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value) if isinstance(value, float) else str(value)


def to_config_text(spec: ArchitectureSpec) -> str:
    """Serialize deterministically; parse(to_config_text(x)) == x."""
    out = io.StringIO()
    out.write(f"[architecture]\nname = {spec.name}\n")
    for m in spec.modules:
        out.write(f"\n[module {m.id}]\n")
        for key, attr, _, default in _MODULE_FIELDS:
            if key == "code_family":
                value = m.code.family
            elif key == "code_distance":
                value = m.code.distance
            elif key == "code_anc_fraction":
                value = m.code.c_anc
            elif key == "modality":
                value = m.modality.name
            elif key in ("p_phys", "p_th", "t1_s", "t2_s"):
                value = getattr(m.modality, key)
            else:
                value = getattr(m, attr)
            if value is None or (default is not None and value == default):
                continue
            out.write(f"{key} = {_fmt(value)}\n")
    for l in spec.links:
        out.write(f"\n[link {l.a} {l.b}]\n")
        for key, _ in _LINK_FIELDS:
            out.write(f"{key} = {_fmt(getattr(l, key))}\n")
    return out.getvalue()


def parse_config_text(text: str) -> ArchitectureSpec:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"bad config: {exc}") from exc
    if "architecture" not in cp:
        raise ConfigError("missing [architecture] section")
    name = cp["architecture"].get("name", "unnamed")
    spec = ArchitectureSpec(name)
    for section in cp.sections():
        if section == "architecture":
            continue
        parts = section.split()
        if parts[0] == "module" and len(parts) == 2:
            spec.modules.append(_parse_module(parts[1], cp[section]))
        elif parts[0] == "link" and len(parts) == 3:
            spec.links.append(_parse_link(parts[1], parts[2], cp[section]))
        else:
            raise ConfigError(f"unrecognized section [{section}]")
    return spec


def _section_value(section, key: str, type_name: str, where: str):
    raw = section.get(key)
    if raw is None:
        return None
    try:
        return _T[type_name](raw)
    except ValueError as exc:
        raise ConfigError(f"{where}: bad value for {key}: {raw!r}") from exc


def _parse_module(module_id: str, section) -> ModuleSpec:
    where = f"module {module_id}"
    values = {}
    for key, attr, type_name, default in _MODULE_FIELDS:
        parsed = _section_value(section, key, type_name, where)
        if attr is not None:
            values[attr] = parsed if parsed is not None else default
        else:
            values[key] = parsed
    for required in ("kind", "n_logical", "code_family", "code_distance",
                     "p_phys", "p_th", "t1_s", "t2_s", "t_cycle_s"):
        if values.get(required) is None:
            raise ConfigError(f"{where}: missing {required}")
    for key in section:
        if key not in {k for k, _, _, _ in _MODULE_FIELDS}:
            raise ConfigError(f"{where}: unknown key {key!r}")
    c_anc = values.pop("code_anc_fraction")
    code = CodeSpec(values.pop("code_family"), values.pop("code_distance"),
                    1.0 if c_anc is None else c_anc)
    modality_name = values.pop("modality")
    modality = ModalitySpec("custom" if modality_name is None else modality_name,
                            values.pop("p_phys"), values.pop("p_th"),
                            values.pop("t1_s"), values.pop("t2_s"))
    return ModuleSpec(id=module_id, code=code, modality=modality, **values)


def _parse_link(a: str, b: str, section) -> LinkSpec:
    where = f"link {a}-{b}"
    kwargs = {}
    for key, type_name in _LINK_FIELDS:
        parsed = _section_value(section, key, type_name, where)
        if parsed is not None:
            kwargs[key] = parsed
    for key in section:
        if key not in {k for k, _ in _LINK_FIELDS}:
            raise ConfigError(f"{where}: unknown key {key!r}")
    if "protocol" not in kwargs:
        raise ConfigError(f"{where}: missing protocol")
    return LinkSpec(a, b, **kwargs)


_OVERRIDE_ALIASES = {"d": "code_distance", "n": "logical_qubits"}


def apply_override(spec: ArchitectureSpec, override: str) -> None:
    """Apply ``<module>.<key>=<value>`` in place.

    ``<module>`` is a module id, or a module kind in lowercase when unique
    (so ``qpu.d=21`` works on any builtin).  Keys are config-file keys, with
    ``d`` and ``n`` accepted as shorthand.
    """
    head, eq, raw_value = override.partition("=")
    if not eq:
        raise ConfigError(f"override {override!r} must look like module.key=value")
    target, dot, key = head.partition(".")
    if not dot:
        raise ConfigError(f"override {override!r} must name module.key")
    key = _OVERRIDE_ALIASES.get(key, key)
    matches = [m for m in spec.modules if m.id == target]
    if not matches:
        matches = [m for m in spec.modules if m.kind.lower() == target.lower()]
    if not matches:
        raise ConfigError(f"override: no module matching {target!r}")
    if len(matches) > 1:
        raise ConfigError(f"override: {target!r} is ambiguous")
    module = matches[0]
    for cfg_key, attr, type_name, _ in _MODULE_FIELDS:
        if cfg_key != key:
            continue
        try:
            value = _T[type_name](raw_value)
        except ValueError as exc:
            raise ConfigError(f"override {override!r}: bad value") from exc
        if cfg_key == "code_distance":
            module.code = replace(module.code, distance=value)
        elif cfg_key == "code_family":
            module.code = replace(module.code, family=value)
        elif cfg_key == "code_anc_fraction":
            module.code = replace(module.code, c_anc=value)
        elif cfg_key in ("p_phys", "p_th", "t1_s", "t2_s"):
            module.modality = replace(module.modality, **{cfg_key: value})
        elif cfg_key == "modality":
            module.modality = replace(module.modality, name=value)
        else:
            setattr(module, attr, value)
        return
    raise ConfigError(f"override: unknown key {key!r}")


def load_architecture(name_or_path: str) -> ArchitectureSpec:
    """Builtin by name, else a config file by path."""
    if name_or_path in BUILTIN_NAMES:
        return builtin_architecture(name_or_path)
    try:
        with open(name_or_path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read architecture {name_or_path!r}: {exc}")
    return parse_config_text(text)


__all__ = [
    "MODULE_KINDS", "LINK_PROTOCOLS", "GROSS_BLOCK_PHYSICAL",
    "GROSS_BLOCK_LOGICAL", "ConfigError", "CodeSpec", "ModalitySpec",
    "ModuleSpec", "LinkSpec", "ArchitectureSpec", "Boundary",
    "derive_boundary", "validate", "builtin_architecture", "BUILTIN_NAMES",
    "MODALITIES", "to_config_text", "parse_config_text", "apply_override",
    "load_architecture",
]
