"""Three-tier compute topology: sites, device nodes, links, input nodes.

The topology is a forest of trees rooted at cloud sites.  Data flows
strictly upward: an input node feeds its user-edge site, which uplinks to
one carrier-edge site, which uplinks to one cloud site.  Applications can
be hosted at any site on that root path; the links between the input's
user edge and the hosting site are the ones a placement occupies.

Topologies are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Mapping


class ValidationError(ValueError):
    """A domain invariant or construction precondition was violated."""

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = list(violations or [])


class Tier(Enum):
    USER_EDGE = "user"
    CARRIER_EDGE = "carrier"
    CLOUD = "cloud"

    @property
    def distance_from_user(self) -> int:
        """Hop count from the user edge: user 0, carrier 1, cloud 2."""
        return _TIER_DISTANCE[self]


_TIER_DISTANCE = {Tier.USER_EDGE: 0, Tier.CARRIER_EDGE: 1, Tier.CLOUD: 2}

# Child tier -> required parent tier for any uplink.
_UPLINK_PARENT = {Tier.USER_EDGE: Tier.CARRIER_EDGE, Tier.CARRIER_EDGE: Tier.CLOUD}


class DeviceClass(Enum):
    CPU = "cpu"
    GPU = "gpu"
    FPGA = "fpga"


# Canonical emission order for fleets, ids, and serialized tables.
CLASS_ORDER = (DeviceClass.CPU, DeviceClass.GPU, DeviceClass.FPGA)


@dataclass(frozen=True)
class DeviceNode:
    """One server instance.

    ``capacity`` is in class-specific resource units (GB of RAM for GPU,
    percent-points of fabric for FPGA, abstract units for CPU);
    ``full_cost`` is the money per month charged for using the whole
    device.
    """

    id: str
    site_id: str
    tier: Tier
    device_class: DeviceClass
    capacity: float
    full_cost: float


@dataclass(frozen=True)
class Link:
    """Directed uplink from a child site to its parent site."""

    id: str
    child_site: str
    parent_site: str
    bandwidth_capacity: float  # Mbps
    monthly_cost: float  # money per month for full utilization


@dataclass(frozen=True)
class Site:
    id: str
    tier: Tier
    devices: tuple[str, ...]


@dataclass(frozen=True)
class InputNode:
    """Traffic source attached to a user-edge site.

    The input-to-user-edge hop is not modeled: it carries no cost, no
    latency, and no bandwidth limit.
    """

    id: str
    attached_user_edge: str


@dataclass(frozen=True)
class Topology:
    sites: Mapping[str, Site]
    devices: Mapping[str, DeviceNode]
    links: Mapping[str, Link]
    input_nodes: Mapping[str, InputNode]

    @cached_property
    def uplink_by_child(self) -> Mapping[str, Link]:
        """Child site id -> its (unique) uplink."""
        return {link.child_site: link for link in self.links.values()}


@dataclass(frozen=True)
class FleetSpec:
    """How many servers of one class each site of a tier hosts."""

    device_class: DeviceClass
    count: int
    capacity: float  # per server
    full_cost: float  # per server, per month


@dataclass(frozen=True)
class TierSpec:
    sites: int
    fleet: tuple[FleetSpec, ...] = ()


@dataclass(frozen=True)
class LinkSpec:
    bandwidth_capacity: float  # Mbps
    monthly_cost: float


@dataclass(frozen=True)
class TopologySpec:
    cloud: TierSpec
    carrier: TierSpec
    user: TierSpec
    input_nodes: int
    user_carrier_link: LinkSpec
    carrier_cloud_link: LinkSpec


def _check_attachment(child_count: int, parent_count: int, child_name: str,
                      parent_name: str, errors: list[str]) -> None:
    if child_count == 0:
        return
    if parent_count == 0:
        errors.append(f"{child_count} {child_name} but no {parent_name} to attach to")
    elif child_count % parent_count != 0:
        errors.append(
            f"{child_name} count {child_count} not divisible by "
            f"{parent_name} count {parent_count}; balanced attachment impossible"
        )


def build_topology(spec: TopologySpec) -> Topology:
    """Build a balanced tree topology from per-tier counts and fleets.

    Children are attached round-robin in contiguous blocks: with c
    children per parent, child i goes to parent i // c.  Ids are derived
    from tier name and index, so identical specs produce identical
    topologies.

    Raises ValidationError when counts are not divisible for balanced
    attachment or a fleet entry has non-positive capacity, negative cost,
    or negative count.
    """
    errors: list[str] = []
    _check_attachment(spec.carrier.sites, spec.cloud.sites, "carrier sites", "cloud sites", errors)
    _check_attachment(spec.user.sites, spec.carrier.sites, "user sites", "carrier sites", errors)
    _check_attachment(spec.input_nodes, spec.user.sites, "input nodes", "user sites", errors)
    for tier_name, tier_spec in (("cloud", spec.cloud), ("carrier", spec.carrier), ("user", spec.user)):
        if tier_spec.sites < 0:
            errors.append(f"{tier_name} site count is negative")
        for entry in tier_spec.fleet:
            if entry.count < 0:
                errors.append(f"{tier_name} {entry.device_class.value} server count is negative")
            if entry.count > 0 and entry.capacity <= 0:
                errors.append(f"{tier_name} {entry.device_class.value} capacity must be > 0")
            if entry.count > 0 and entry.full_cost < 0:
                errors.append(f"{tier_name} {entry.device_class.value} cost must be >= 0")
    if spec.input_nodes < 0:
        errors.append("input node count is negative")
    for name, link in (("user-carrier", spec.user_carrier_link), ("carrier-cloud", spec.carrier_cloud_link)):
        if link.bandwidth_capacity <= 0:
            errors.append(f"{name} link bandwidth must be > 0")
        if link.monthly_cost < 0:
            errors.append(f"{name} link cost must be >= 0")
    if errors:
        raise ValidationError("invalid topology spec: " + "; ".join(errors), errors)

    sites: dict[str, Site] = {}
    devices: dict[str, DeviceNode] = {}
    links: dict[str, Link] = {}
    input_nodes: dict[str, InputNode] = {}

    def add_sites(prefix: str, tier: Tier, tier_spec: TierSpec) -> list[str]:
        ids = []
        for i in range(tier_spec.sites):
            site_id = f"{prefix}{i:03d}"
            site_devices = []
            for entry in sorted(tier_spec.fleet, key=lambda e: CLASS_ORDER.index(e.device_class)):
                for j in range(entry.count):
                    device_id = f"{site_id}_{entry.device_class.value}{j:02d}"
                    devices[device_id] = DeviceNode(
                        id=device_id,
                        site_id=site_id,
                        tier=tier,
                        device_class=entry.device_class,
                        capacity=entry.capacity,
                        full_cost=entry.full_cost,
                    )
                    site_devices.append(device_id)
            sites[site_id] = Site(id=site_id, tier=tier, devices=tuple(site_devices))
            ids.append(site_id)
        return ids

    cloud_ids = add_sites("cloud", Tier.CLOUD, spec.cloud)
    carrier_ids = add_sites("carrier", Tier.CARRIER_EDGE, spec.carrier)
    user_ids = add_sites("user", Tier.USER_EDGE, spec.user)

    def attach(children: list[str], parents: list[str], link_spec: LinkSpec) -> None:
        per_parent = len(children) // len(parents) if parents else 0
        for i, child in enumerate(children):
            parent = parents[i // per_parent]
            link_id = f"link_{child}_{parent}"
            links[link_id] = Link(
                id=link_id,
                child_site=child,
                parent_site=parent,
                bandwidth_capacity=link_spec.bandwidth_capacity,
                monthly_cost=link_spec.monthly_cost,
            )

    if carrier_ids:
        attach(carrier_ids, cloud_ids, spec.carrier_cloud_link)
    if user_ids:
        attach(user_ids, carrier_ids, spec.user_carrier_link)

    per_user = spec.input_nodes // len(user_ids) if user_ids else 0
    for n in range(spec.input_nodes):
        input_id = f"input{n:03d}"
        input_nodes[input_id] = InputNode(id=input_id, attached_user_edge=user_ids[n // per_user])

    return Topology(sites=sites, devices=devices, links=links, input_nodes=input_nodes)


def root_path_sites(topology: Topology, input_node_id: str) -> list[str]:
    """Sites reachable from an input node, nearest first (user edge up to the root)."""
    node = topology.input_nodes[input_node_id]
    path = [node.attached_user_edge]
    while (link := topology.uplink_by_child.get(path[-1])) is not None:
        path.append(link.parent_site)
    return path


def uplink_path(topology: Topology, input_node_id: str, site_id: str) -> list[str]:
    """Ordered link ids from the input's user edge up to the hosting site.

    Empty when the hosting site is the input's own user edge.  Raises
    ValueError when the site is not an ancestor-or-self of the input's
    user edge (devices in a foreign subtree are unreachable).
    """
    node = topology.input_nodes[input_node_id]
    if site_id not in topology.sites:
        raise KeyError(f"unknown site {site_id!r}")
    current = node.attached_user_edge
    path: list[str] = []
    while current != site_id:
        link = topology.uplink_by_child.get(current)
        if link is None:
            raise ValueError(
                f"site {site_id!r} is not on the uplink path of input {input_node_id!r}"
            )
        path.append(link.id)
        current = link.parent_site
    return path


def validate_topology(topology: Topology) -> list[str]:
    """Check every topology invariant; returns violations (empty when valid)."""
    violations: list[str] = []

    for key, site in topology.sites.items():
        if key != site.id:
            violations.append(f"site key {key!r} does not match id {site.id!r}")
    for key, link in topology.links.items():
        if key != link.id:
            violations.append(f"link key {key!r} does not match id {link.id!r}")
    for key, node in topology.input_nodes.items():
        if key != node.id:
            violations.append(f"input key {key!r} does not match id {node.id!r}")
    for key, dev in topology.devices.items():
        if key != dev.id:
            violations.append(f"device key {key!r} does not match id {dev.id!r}")

    # Device attachment: exactly one site must list each device.
    listed_by: dict[str, list[str]] = {}
    for site in topology.sites.values():
        for device_id in site.devices:
            listed_by.setdefault(device_id, []).append(site.id)
    for device_id, owners in listed_by.items():
        if device_id not in topology.devices:
            violations.append(f"site {owners[0]!r} lists unknown device {device_id!r}")
        elif len(owners) > 1:
            violations.append(f"device {device_id!r} attached to multiple sites: {owners}")
    for dev in topology.devices.values():
        owners = listed_by.get(dev.id, [])
        if not owners:
            violations.append(f"device {dev.id!r} not listed by any site")
        elif len(owners) == 1:
            site = topology.sites.get(owners[0])
            if dev.site_id != owners[0]:
                violations.append(
                    f"device {dev.id!r} has site_id {dev.site_id!r} but is listed by {owners[0]!r}"
                )
            elif site is not None and dev.tier != site.tier:
                violations.append(f"device {dev.id!r} tier differs from site {site.id!r} tier")
        if dev.capacity <= 0:
            violations.append(f"device {dev.id!r} capacity must be > 0")
        if dev.full_cost < 0:
            violations.append(f"device {dev.id!r} cost must be >= 0")

    uplink_count: dict[str, int] = {}
    for link in topology.links.values():
        child = topology.sites.get(link.child_site)
        parent = topology.sites.get(link.parent_site)
        if child is None or parent is None:
            violations.append(f"link {link.id!r} references unknown site")
            continue
        expected_parent = _UPLINK_PARENT.get(child.tier)
        if expected_parent is None:
            violations.append(f"link {link.id!r} has a cloud site as child")
            continue
        if parent.tier != expected_parent:
            violations.append(
                f"link {link.id!r} parent tier {parent.tier.value} is not {expected_parent.value}"
            )
        uplink_count[link.child_site] = uplink_count.get(link.child_site, 0) + 1
        if link.bandwidth_capacity <= 0:
            violations.append(f"link {link.id!r} bandwidth must be > 0")
        if link.monthly_cost < 0:
            violations.append(f"link {link.id!r} cost must be >= 0")

    for site in topology.sites.values():
        if site.tier is Tier.CLOUD:
            continue
        count = uplink_count.get(site.id, 0)
        if count != 1:
            violations.append(f"site {site.id!r} has {count} uplinks, expected exactly 1")

    for node in topology.input_nodes.values():
        site = topology.sites.get(node.attached_user_edge)
        if site is None:
            violations.append(f"input {node.id!r} attached to unknown site {node.attached_user_edge!r}")
        elif site.tier is not Tier.USER_EDGE:
            violations.append(f"input {node.id!r} attached to non-user-edge site {site.id!r}")

    return violations
