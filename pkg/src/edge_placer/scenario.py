"""Scenario schema: topology plan, pricing, links, app catalog, request menus.

A scenario is the single input document for a simulation run.  The file
format is a UTF-8 sectioned text format: ``key = value`` lines grouped
under ``[section]`` headers, with ``[[apps]]`` starting one app entry
per occurrence.  Values are JSON literals (numbers, strings, booleans,
arrays, objects), so nested tables like menus stay on one line.  Parsing
is schema-validating and every error message is anchored to a line
number.

Device pricing model
--------------------
Devices are priced per resource unit: ``unit_price`` gives the cloud
tier's money per unit per month for each device class, and a device's
full monthly cost is unit price x tier multiplier x device capacity.
Example: at 6250 yen/GB a 16 GB cloud GPU costs 100000 yen/month while a
4 GB user-edge GPU costs 6250 x 1.5 x 4 = 37500 yen/month.  Setting
``flat_server_pricing = true`` switches to flat per-server pricing for
sensitivity runs: every device of a class then costs the cloud-sized
server's price times the tier multiplier, regardless of its capacity.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Any, Mapping

from .model import (
    CLASS_ORDER,
    DeviceClass,
    FleetSpec,
    LinkSpec,
    Tier,
    TierSpec,
    TopologySpec,
)
from .pricing import AppType, AppVariant

SCHEMA_VERSION = 1

_SECTIONS = ("topology", "pricing", "links", "apps", "requests")


class ScenarioError(ValueError):
    """Structural or semantic problem in a scenario document."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass(frozen=True)
class TierPlan:
    """Per-site fleet of one tier: server counts and per-server capacities."""

    sites: int
    fleet: Mapping[DeviceClass, int]
    capacity: Mapping[DeviceClass, float]


@dataclass(frozen=True)
class AppEntry:
    app: AppType
    mix_weight: float
    price_menu: tuple[float, ...]
    deadline_menu: tuple[float, ...]


@dataclass(frozen=True)
class Scenario:
    schema_version: int
    name: str
    cloud: TierPlan
    carrier: TierPlan
    user: TierPlan
    input_nodes: int
    unit_price: Mapping[DeviceClass, float]  # cloud tier, money per resource unit
    carrier_multiplier: float
    user_multiplier: float
    flat_server_pricing: bool
    user_carrier_link: LinkSpec
    carrier_cloud_link: LinkSpec
    apps: tuple[AppEntry, ...]

    def tier_multiplier(self, tier: Tier) -> float:
        if tier is Tier.CLOUD:
            return 1.0
        return self.carrier_multiplier if tier is Tier.CARRIER_EDGE else self.user_multiplier

    def tier_plan(self, tier: Tier) -> TierPlan:
        return {Tier.CLOUD: self.cloud, Tier.CARRIER_EDGE: self.carrier, Tier.USER_EDGE: self.user}[tier]

    def device_full_cost(self, tier: Tier, device_class: DeviceClass) -> float:
        """Monthly cost of one whole device of that class at that tier."""
        if self.flat_server_pricing:
            reference_capacity = self.cloud.capacity[device_class]
            return self.unit_price[device_class] * reference_capacity * self.tier_multiplier(tier)
        capacity = self.tier_plan(tier).capacity[device_class]
        return self.unit_price[device_class] * capacity * self.tier_multiplier(tier)

    def topology_spec(self) -> TopologySpec:
        def tier_spec(tier: Tier) -> TierSpec:
            plan = self.tier_plan(tier)
            fleet = tuple(
                FleetSpec(
                    device_class=cls,
                    count=plan.fleet[cls],
                    capacity=plan.capacity[cls],
                    full_cost=self.device_full_cost(tier, cls),
                )
                for cls in CLASS_ORDER
                if plan.fleet.get(cls, 0) > 0
            )
            return TierSpec(sites=plan.sites, fleet=fleet)

        return TopologySpec(
            cloud=tier_spec(Tier.CLOUD),
            carrier=tier_spec(Tier.CARRIER_EDGE),
            user=tier_spec(Tier.USER_EDGE),
            input_nodes=self.input_nodes,
            user_carrier_link=self.user_carrier_link,
            carrier_cloud_link=self.carrier_cloud_link,
        )

    def app_entry(self, name: str) -> AppEntry:
        for entry in self.apps:
            if entry.app.name == name:
                return entry
        raise KeyError(f"no app named {name!r}")

    def mix_cumulative(self) -> list[float]:
        """Cumulative selection probabilities following the app catalog order."""
        total = sum(entry.mix_weight for entry in self.apps)
        acc, out = 0.0, []
        for entry in self.apps:
            acc += entry.mix_weight / total
            out.append(acc)
        out[-1] = 1.0
        return out


def paper_scenario() -> Scenario:
    """Built-in evaluation preset.

    5 cloud / 20 carrier / 60 user-edge sites, 300 input nodes; per-site
    fleets 8+4+2, 4+2+1 and 2+1 servers; cloud full-server prices 50000
    (CPU, 100 units), 100000 (GPU, 16 GB) and 120000 yen (FPGA, 100
    percent-points), with carrier/user multipliers 1.25 and 1.5; links
    100 Mbps / 8000 yen above carrier, 30 Mbps / 5000 yen below; an FFT
    batch app (GPU-offloaded, 5x over CPU) and an image-reconstruction
    app (FPGA-offloaded, 7x over CPU) mixed 3:1.
    """
    nas_ft = AppType(
        name="NAS.FT",
        transfer_data_size=0.2,
        bandwidth_demand=2.0,
        variants=(
            AppVariant(DeviceClass.GPU, processing_time=5.8, resource_demand=1.0),
            AppVariant(DeviceClass.CPU, processing_time=29.0, resource_demand=100.0),
        ),
    )
    mri_q = AppType(
        name="MRI-Q",
        transfer_data_size=0.15,
        bandwidth_demand=1.0,
        variants=(
            AppVariant(DeviceClass.FPGA, processing_time=2.0, resource_demand=10.0),
            AppVariant(DeviceClass.CPU, processing_time=14.0, resource_demand=100.0),
        ),
    )
    return Scenario(
        schema_version=SCHEMA_VERSION,
        name="paper-3tier",
        cloud=TierPlan(
            sites=5,
            fleet={DeviceClass.CPU: 8, DeviceClass.GPU: 4, DeviceClass.FPGA: 2},
            capacity={DeviceClass.CPU: 100.0, DeviceClass.GPU: 16.0, DeviceClass.FPGA: 100.0},
        ),
        carrier=TierPlan(
            sites=20,
            fleet={DeviceClass.CPU: 4, DeviceClass.GPU: 2, DeviceClass.FPGA: 1},
            capacity={DeviceClass.CPU: 100.0, DeviceClass.GPU: 8.0, DeviceClass.FPGA: 100.0},
        ),
        user=TierPlan(
            sites=60,
            fleet={DeviceClass.CPU: 2, DeviceClass.GPU: 1},
            capacity={DeviceClass.CPU: 100.0, DeviceClass.GPU: 4.0},
        ),
        input_nodes=300,
        unit_price={DeviceClass.CPU: 500.0, DeviceClass.GPU: 6250.0, DeviceClass.FPGA: 1200.0},
        carrier_multiplier=1.25,
        user_multiplier=1.5,
        flat_server_pricing=False,
        user_carrier_link=LinkSpec(bandwidth_capacity=30.0, monthly_cost=5000.0),
        carrier_cloud_link=LinkSpec(bandwidth_capacity=100.0, monthly_cost=8000.0),
        apps=(
            AppEntry(
                app=nas_ft,
                mix_weight=3.0,
                price_menu=(7000.0, 8500.0, 10000.0),
                deadline_menu=(6.0, 7.0, 10.0),
            ),
            AppEntry(
                app=mri_q,
                mix_weight=1.0,
                price_menu=(12500.0, 20000.0),
                deadline_menu=(4.0, 8.0),
            ),
        ),
    )


def cost_performance_demo_scenario() -> Scenario:
    """Tiny offload-or-not demo: all devices at one user-edge site.

    ``mild-speedup`` gains only 1.5x from its GPU form at 2x the price,
    so under a deadline both forms satisfy, the cheaper CPU form wins;
    ``strong-speedup`` gains 3x, so under a cost cap covering both, the
    GPU form wins on response time.
    """
    mild = AppType(
        name="mild-speedup",
        transfer_data_size=0.0,
        bandwidth_demand=1.0,
        variants=(
            AppVariant(DeviceClass.CPU, processing_time=10.0, resource_demand=1.0),
            AppVariant(DeviceClass.GPU, processing_time=10.0 / 1.5, resource_demand=1.0),
        ),
    )
    strong = AppType(
        name="strong-speedup",
        transfer_data_size=0.0,
        bandwidth_demand=1.0,
        variants=(
            AppVariant(DeviceClass.CPU, processing_time=10.0, resource_demand=1.0),
            AppVariant(DeviceClass.GPU, processing_time=10.0 / 3.0, resource_demand=1.0),
        ),
    )
    return Scenario(
        schema_version=SCHEMA_VERSION,
        name="cost-performance-demo",
        cloud=TierPlan(sites=1, fleet={}, capacity={}),
        carrier=TierPlan(sites=1, fleet={}, capacity={}),
        user=TierPlan(
            sites=1,
            fleet={DeviceClass.CPU: 2, DeviceClass.GPU: 2},
            capacity={DeviceClass.CPU: 1.0, DeviceClass.GPU: 1.0},
        ),
        input_nodes=1,
        unit_price={DeviceClass.CPU: 1000.0, DeviceClass.GPU: 2000.0},
        carrier_multiplier=1.0,
        user_multiplier=1.0,
        flat_server_pricing=False,
        user_carrier_link=LinkSpec(bandwidth_capacity=100.0, monthly_cost=0.0),
        carrier_cloud_link=LinkSpec(bandwidth_capacity=100.0, monthly_cost=0.0),
        apps=(
            AppEntry(app=mild, mix_weight=1.0, price_menu=(1000.0, 2000.0), deadline_menu=(7.0, 12.0)),
            AppEntry(app=strong, mix_weight=1.0, price_menu=(2000.0,), deadline_menu=(4.0, 12.0)),
        ),
    )


# --- file format ------------------------------------------------------------

_TIER_KEYS = {Tier.CLOUD: "cloud", Tier.CARRIER_EDGE: "carrier", Tier.USER_EDGE: "user"}


class _Doc:
    """Parsed document: sections of key -> (value, line)."""

    def __init__(self):
        self.top: dict[str, tuple[Any, int]] = {}
        self.sections: dict[str, dict[str, tuple[Any, int]]] = {}
        self.apps: list[dict[str, tuple[Any, int]]] = []
        self.section_lines: dict[str, int] = {}


def _strip_comment(line: str) -> str:
    """Drop a trailing ``#`` comment, ignoring ``#`` inside JSON strings."""
    in_string = False
    escaped = False
    for i, ch in enumerate(line):
        if escaped:
            escaped = False
        elif ch == "\\" and in_string:
            escaped = True
        elif ch == '"':
            in_string = not in_string
        elif ch == "#" and not in_string:
            return line[:i]
    return line


def _parse_lines(text: str) -> _Doc:
    doc = _Doc()
    current: dict[str, tuple[Any, int]] | None = doc.top
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line == "[[apps]]":
            entry: dict[str, tuple[Any, int]] = {}
            doc.apps.append(entry)
            current = entry
            continue
        if line.startswith("[[") and line.endswith("]]"):
            raise ScenarioError(f"unknown repeated section {line}", lineno)
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                raise ScenarioError(f"unknown section [{name}]", lineno)
            if name == "apps":
                raise ScenarioError("apps entries are written as [[apps]]", lineno)
            if name in doc.sections:
                raise ScenarioError(f"duplicate section [{name}]", lineno)
            doc.sections[name] = {}
            doc.section_lines[name] = lineno
            current = doc.sections[name]
            continue
        key, sep, value_text = line.partition("=")
        if not sep:
            raise ScenarioError(f"expected 'key = value' or a section header, got {line!r}", lineno)
        key = key.strip()
        try:
            value = json.loads(value_text.strip())
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"invalid value for {key!r}: {exc.msg}", lineno) from None
        if key in current:
            raise ScenarioError(f"duplicate key {key!r}", lineno)
        current[key] = (value, lineno)
    return doc


class _SectionReader:
    def __init__(self, name: str, data: dict[str, tuple[Any, int]], line: int = 0):
        self.name = name
        self.data = data
        self.line = line
        self.seen: set[str] = set()

    def take(self, key: str, kind: type | tuple[type, ...]):
        if key not in self.data:
            raise ScenarioError(f"[{self.name}] is missing key {key!r}", self.line or None)
        self.seen.add(key)
        value, line = self.data[key]
        if kind is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ScenarioError(f"{key!r} must be a number", line)
            return float(value), line
        if kind is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ScenarioError(f"{key!r} must be an integer", line)
            return value, line
        if not isinstance(value, kind):
            kind_name = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
            raise ScenarioError(f"{key!r} must be a {kind_name}", line)
        return value, line

    def finish(self):
        for key, (_, line) in self.data.items():
            if key not in self.seen:
                raise ScenarioError(f"unknown key {key!r} in [{self.name}]", line)


def _class_map(reader: _SectionReader, key: str, kind: type, minimum: float | None,
               allow_zero: bool) -> dict[DeviceClass, Any]:
    raw, line = reader.take(key, dict)
    out: dict[DeviceClass, Any] = {}
    for cls_name, value in raw.items():
        try:
            cls = DeviceClass(cls_name)
        except ValueError:
            raise ScenarioError(f"{key!r}: unknown device class {cls_name!r}", line) from None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ScenarioError(f"{key!r}: value for {cls_name!r} must be a number", line)
        if minimum is not None and (value < minimum or (value == minimum and not allow_zero)):
            op = ">=" if allow_zero else ">"
            raise ScenarioError(f"{key!r}: value for {cls_name!r} must be {op} {minimum}", line)
        out[cls] = kind(value)
    return out


def _menu(raw: Any, key: str, line: int) -> tuple[float, ...]:
    if not isinstance(raw, list):
        raise ScenarioError(f"{key!r} must be an array", line)
    values = []
    for v in raw:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or v <= 0:
            raise ScenarioError(f"{key!r}: menu values must be positive numbers", line)
        values.append(float(v))
    if any(a >= b for a, b in zip(values, values[1:])):
        raise ScenarioError(f"{key!r}: menu values must be strictly increasing", line)
    return tuple(values)


def parse_scenario(text: str) -> Scenario:
    """Parse and schema-validate a scenario document."""
    doc = _parse_lines(text)

    top = _SectionReader("document", doc.top)
    version, vline = top.take("schema_version", int)
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"unsupported schema_version {version}", vline)
    name, _ = top.take("name", str)
    top.finish()

    for section in ("topology", "pricing", "links", "requests"):
        if section not in doc.sections:
            raise ScenarioError(f"missing section [{section}]")
    if not doc.apps:
        raise ScenarioError("missing section [[apps]]: at least one app is required")

    topo = _SectionReader("topology", doc.sections["topology"], doc.section_lines["topology"])
    counts = {}
    for key in ("cloud_sites", "carrier_sites", "user_sites", "input_nodes"):
        value, line = topo.take(key, int)
        if value < 0:
            raise ScenarioError(f"{key!r} must be >= 0", line)
        counts[key] = value
    plans: dict[Tier, TierPlan] = {}
    for tier, tier_key in _TIER_KEYS.items():
        fleet = _class_map(topo, f"{tier_key}_fleet", int, 0, allow_zero=True)
        capacity = _class_map(topo, f"{tier_key}_capacity", float, 0, allow_zero=False)
        for cls, count in fleet.items():
            if count > 0 and cls not in capacity:
                raise ScenarioError(
                    f"'{tier_key}_capacity' is missing device class {cls.value!r} "
                    f"used by '{tier_key}_fleet'",
                    doc.section_lines["topology"],
                )
        plans[tier] = TierPlan(sites=counts[f"{tier_key}_sites"], fleet=fleet, capacity=capacity)
    topo.finish()

    pricing = _SectionReader("pricing", doc.sections["pricing"], doc.section_lines["pricing"])
    unit_price = _class_map(pricing, "unit_price", float, 0, allow_zero=True)
    carrier_multiplier, line = pricing.take("carrier_multiplier", float)
    if carrier_multiplier <= 0:
        raise ScenarioError("'carrier_multiplier' must be > 0", line)
    user_multiplier, line = pricing.take("user_multiplier", float)
    if user_multiplier <= 0:
        raise ScenarioError("'user_multiplier' must be > 0", line)
    flat, _ = pricing.take("flat_server_pricing", bool)
    pricing.finish()

    links = _SectionReader("links", doc.sections["links"], doc.section_lines["links"])
    link_specs = {}
    for key in ("user_carrier", "carrier_cloud"):
        raw, line = links.take(key, dict)
        if set(raw) != {"bandwidth_mbps", "monthly_cost"}:
            raise ScenarioError(f"{key!r} must have exactly bandwidth_mbps and monthly_cost", line)
        bandwidth, cost = raw["bandwidth_mbps"], raw["monthly_cost"]
        for field_name, value in (("bandwidth_mbps", bandwidth), ("monthly_cost", cost)):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ScenarioError(f"{key!r}: {field_name} must be a number", line)
        if bandwidth <= 0:
            raise ScenarioError(f"{key!r}: bandwidth_mbps must be > 0", line)
        if cost < 0:
            raise ScenarioError(f"{key!r}: monthly_cost must be >= 0", line)
        link_specs[key] = LinkSpec(bandwidth_capacity=float(bandwidth), monthly_cost=float(cost))
    links.finish()

    app_types: list[AppType] = []
    for i, entry in enumerate(doc.apps):
        reader = _SectionReader(f"apps #{i + 1}", entry)
        app_name, nline = reader.take("name", str)
        if not app_name:
            raise ScenarioError("app name must be non-empty", nline)
        if any(a.name == app_name for a in app_types):
            raise ScenarioError(f"duplicate app name {app_name!r}", nline)
        data_mb, line = reader.take("transfer_data_mb", float)
        if data_mb < 0:
            raise ScenarioError("'transfer_data_mb' must be >= 0", line)
        bandwidth, line = reader.take("bandwidth_mbps", float)
        if bandwidth <= 0:
            raise ScenarioError("'bandwidth_mbps' must be > 0", line)
        raw_variants, vline2 = reader.take("variants", list)
        variants = []
        for raw in raw_variants:
            if not isinstance(raw, dict) or set(raw) != {"device_class", "processing_time_s", "resource_demand"}:
                raise ScenarioError(
                    "each variant needs exactly device_class, processing_time_s, resource_demand",
                    vline2,
                )
            try:
                cls = DeviceClass(raw["device_class"])
            except ValueError:
                raise ScenarioError(f"unknown device class {raw['device_class']!r}", vline2) from None
            for field_name in ("processing_time_s", "resource_demand"):
                value = raw[field_name]
                if isinstance(value, bool) or not isinstance(value, (int, float)) or value <= 0:
                    raise ScenarioError(f"variant {field_name} must be > 0", vline2)
            if any(v.device_class is cls for v in variants):
                raise ScenarioError(f"duplicate variant class {cls.value!r}", vline2)
            variants.append(
                AppVariant(cls, float(raw["processing_time_s"]), float(raw["resource_demand"]))
            )
        if not variants:
            raise ScenarioError(f"app {app_name!r} needs at least one variant", vline2)
        reader.finish()
        app_types.append(
            AppType(
                name=app_name,
                transfer_data_size=data_mb,
                bandwidth_demand=bandwidth,
                variants=tuple(variants),
            )
        )

    requests = _SectionReader("requests", doc.sections["requests"], doc.section_lines["requests"])
    mix_raw, mix_line = requests.take("mix", dict)
    price_menus, pm_line = requests.take("price_menus", dict)
    deadline_menus, dm_line = requests.take("deadline_menus", dict)
    requests.finish()
    known_names = {a.name for a in app_types}
    for field_name, table, line in (
        ("mix", mix_raw, mix_line),
        ("price_menus", price_menus, pm_line),
        ("deadline_menus", deadline_menus, dm_line),
    ):
        for app_name in table:
            if app_name not in known_names:
                raise ScenarioError(f"{field_name!r} references unknown app {app_name!r}", line)

    entries = []
    for app_type in app_types:
        if app_type.name not in mix_raw:
            raise ScenarioError(f"'mix' is missing app {app_type.name!r}", mix_line)
        weight = mix_raw[app_type.name]
        if isinstance(weight, bool) or not isinstance(weight, (int, float)) or weight <= 0:
            raise ScenarioError(f"'mix' weight for {app_type.name!r} must be > 0", mix_line)
        entries.append(
            AppEntry(
                app=app_type,
                mix_weight=float(weight),
                price_menu=_menu(price_menus.get(app_type.name, []), "price_menus", pm_line),
                deadline_menu=_menu(deadline_menus.get(app_type.name, []), "deadline_menus", dm_line),
            )
        )

    return Scenario(
        schema_version=version,
        name=name,
        cloud=plans[Tier.CLOUD],
        carrier=plans[Tier.CARRIER_EDGE],
        user=plans[Tier.USER_EDGE],
        input_nodes=counts["input_nodes"],
        unit_price=unit_price,
        carrier_multiplier=carrier_multiplier,
        user_multiplier=user_multiplier,
        flat_server_pricing=flat,
        user_carrier_link=link_specs["user_carrier"],
        carrier_cloud_link=link_specs["carrier_cloud"],
        apps=tuple(entries),
    )


def _dump(value: Any) -> str:
    return json.dumps(value, ensure_ascii=False)


def _class_table(table: Mapping[DeviceClass, Any]) -> str:
    ordered = {cls.value: table[cls] for cls in CLASS_ORDER if cls in table}
    return _dump(ordered)


def serialize_scenario(scenario: Scenario) -> str:
    """Canonical text form; parse(serialize(s)) == s for every valid scenario."""
    out = [
        f"schema_version = {scenario.schema_version}",
        f"name = {_dump(scenario.name)}",
        "",
        "[topology]",
        f"cloud_sites = {scenario.cloud.sites}",
        f"carrier_sites = {scenario.carrier.sites}",
        f"user_sites = {scenario.user.sites}",
        f"input_nodes = {scenario.input_nodes}",
    ]
    for tier_key, plan in (("cloud", scenario.cloud), ("carrier", scenario.carrier), ("user", scenario.user)):
        out.append(f"{tier_key}_fleet = {_class_table(plan.fleet)}")
        out.append(f"{tier_key}_capacity = {_class_table(plan.capacity)}")
    out += [
        "",
        "[pricing]",
        f"unit_price = {_class_table(scenario.unit_price)}",
        f"carrier_multiplier = {_dump(scenario.carrier_multiplier)}",
        f"user_multiplier = {_dump(scenario.user_multiplier)}",
        f"flat_server_pricing = {_dump(scenario.flat_server_pricing)}",
        "",
        "[links]",
    ]
    for key, spec in (("user_carrier", scenario.user_carrier_link), ("carrier_cloud", scenario.carrier_cloud_link)):
        out.append(
            f"{key} = " + _dump({"bandwidth_mbps": spec.bandwidth_capacity, "monthly_cost": spec.monthly_cost})
        )
    for entry in scenario.apps:
        out += [
            "",
            "[[apps]]",
            f"name = {_dump(entry.app.name)}",
            f"transfer_data_mb = {_dump(entry.app.transfer_data_size)}",
            f"bandwidth_mbps = {_dump(entry.app.bandwidth_demand)}",
            "variants = " + _dump([
                {
                    "device_class": v.device_class.value,
                    "processing_time_s": v.processing_time,
                    "resource_demand": v.resource_demand,
                }
                for v in entry.app.variants
            ]),
        ]
    names = [entry.app.name for entry in scenario.apps]
    out += [
        "",
        "[requests]",
        "mix = " + _dump({n: e.mix_weight for n, e in zip(names, scenario.apps)}),
        "price_menus = " + _dump({n: list(e.price_menu) for n, e in zip(names, scenario.apps)}),
        "deadline_menus = " + _dump({n: list(e.deadline_menu) for n, e in zip(names, scenario.apps)}),
        "",
    ]
    return "\n".join(out)


def scenario_hash(scenario: Scenario) -> str:
    return hashlib.sha256(serialize_scenario(scenario).encode("utf-8")).hexdigest()


def validate_scenario(scenario: Scenario) -> list[str]:
    """Cross-checks beyond the schema; returns violations (empty when sound)."""
    violations: list[str] = []

    def check_attach(child: int, parent: int, what: str):
        if child > 0 and (parent == 0 or child % parent != 0):
            violations.append(f"{what}: {child} not divisible by {parent}")

    check_attach(scenario.carrier.sites, scenario.cloud.sites, "carrier sites per cloud site")
    check_attach(scenario.user.sites, scenario.carrier.sites, "user sites per carrier site")
    check_attach(scenario.input_nodes, scenario.user.sites, "input nodes per user site")

    available: set[DeviceClass] = set()
    for plan in (scenario.cloud, scenario.carrier, scenario.user):
        available |= {cls for cls, count in plan.fleet.items() if count > 0 and plan.sites > 0}
    for cls in available:
        if cls not in scenario.unit_price:
            violations.append(f"unit_price is missing device class {cls.value!r}")

    for entry in scenario.apps:
        placeable = [v for v in entry.app.variants if v.device_class in available]
        if not placeable:
            violations.append(
                f"app {entry.app.name!r}: no variant's device class exists anywhere in the topology"
            )
        if not entry.price_menu and not entry.deadline_menu:
            violations.append(f"app {entry.app.name!r}: both request menus are empty")
    return violations
