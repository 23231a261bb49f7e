"""Plain-text network descriptions.

A file starts with ``key = value`` lines; ``type`` selects the family::

    type = grid                 radius = R
    type = uniform_rings        ring_sizes = 1 4 8
                                delta = 4 2
                                gamma = 1 1
                                delta2 = compose        (optional)
    type = geometric            rings = R
                                per_ring = N
                                beta = 90
                                seed = 0
    type = edge_list            source = 0              (optional)
                                n_nodes = N             (optional)

Edge lists follow in an ``[edges]`` section with one ``u v`` pair per line,
and optional node weights in a ``[weights]`` section with ``node weight``
lines.  ``#`` starts a comment.
"""

from pathlib import Path

import numpy as np

from .exceptions import ConfigError
from .topology import (GeometricDeployment, GridSpec, Network, RingNetwork, build_geometric,
                       build_grid, build_uniform_rings, rings_from_network)

TYPES = ("grid", "uniform_rings", "geometric", "edge_list")


def parse_network(text):
    """Parse a description into ``(header, edges, weights)``."""
    header, edges, weights = {}, [], {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip().lower()
            if section not in ("edges", "weights"):
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        try:
            if section is None:
                key, sep, value = line.partition("=")
                if not sep:
                    raise ValueError("expected 'key = value'")
                header[key.strip().lower()] = value.strip()
            elif section == "edges":
                u, v = line.split()
                edges.append((int(u), int(v)))
            else:
                node, w = line.split()
                weights[int(node)] = float(w)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}: {raw!r}") from None
    if header.get("type") not in TYPES:
        raise ConfigError(f"'type' must be one of {', '.join(TYPES)}, got {header.get('type')!r}")
    return header, edges, weights


def _ints(header, key):
    try:
        return [int(v) for v in header[key].replace(",", " ").split()]
    except KeyError:
        raise ConfigError(f"missing key '{key}'") from None
    except ValueError:
        raise ConfigError(f"'{key}' must be a list of integers") from None


def _num(header, key, kind=int, default=None):
    if key not in header:
        if default is None:
            raise ConfigError(f"missing key '{key}'")
        return default
    try:
        return kind(header[key])
    except ValueError:
        raise ConfigError(f"'{key}' must be a number, got {header[key]!r}") from None


def network_from_description(header, edges=(), weights=None, strict=True):
    """Build the network a parsed description asks for.

    Ring families give a :class:`RingNetwork`; ``edge_list`` gives a
    :class:`Network` (use :func:`~rcw.topology.rings_from_network` for a
    rings view).
    """
    kind = header.get("type")
    if kind == "grid":
        return build_grid(GridSpec(_num(header, "radius")))
    if kind == "uniform_rings":
        delta2 = header.get("delta2")
        if delta2 is not None and delta2.strip() != "compose":
            delta2 = _ints(header, "delta2")
        return build_uniform_rings(_ints(header, "ring_sizes"), _ints(header, "delta"),
                                   _ints(header, "gamma"),
                                   delta2=delta2.strip() if isinstance(delta2, str) else delta2)
    if kind == "geometric":
        dep = GeometricDeployment(_num(header, "rings"), _num(header, "per_ring"),
                                  _num(header, "beta", float), _num(header, "seed", int, 0))
        return build_geometric(dep, strict=strict)
    if kind == "edge_list":
        n = _num(header, "n_nodes", int, 0) or None
        net = Network.from_edges(edges, n_nodes=n)
        if weights:
            w = np.ones(net.n_nodes)
            for node, value in weights.items():
                if not 0 <= node < net.n_nodes:
                    raise ConfigError(f"weight given for unknown node {node}")
                w[node] = value
            net = net.with_weights(w)
        return net
    raise ConfigError(f"unknown network type {kind!r}")


def load_network(path, strict=True):
    """Read and build the network described in ``path``."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read network file: {exc}") from None
    return network_from_description(*parse_network(text), strict=strict)


def as_ring_network(net, header=None):
    """Ring view of whatever :func:`load_network` returned."""
    if isinstance(net, RingNetwork):
        return net
    source = _num(header or {}, "source", int, 0)
    return rings_from_network(net, source)[0]


def dump_network(net, fh):
    """Write ``net`` as an ``edge_list`` description (weights included)."""
    if isinstance(net, RingNetwork):
        net = net.to_network()
    fh.write("type = edge_list\n")
    fh.write(f"n_nodes = {net.n_nodes}\n")
    fh.write("[edges]\n")
    for u, v in net.edges():
        fh.write(f"{u} {v}\n")
    fh.write("[weights]\n")
    for x, w in enumerate(net.weights):
        fh.write(f"{x} {float(w)!r}\n")
