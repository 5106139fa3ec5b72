"""GraphML serialization of the spreader network.

The output carries per-node authority, hub and betweenness scores,
community id and both language codes, plus the overlap coefficient on
every edge, so the file drops straight into Gephi or similar tools.
Floats are written with repr for lossless round trips.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from typing import Mapping

from spreadnet.graphs import UndirectedGraph

__all__ = ["export_graphml"]

_GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"

_NODE_KEYS = (
    ("authority", "double"),
    ("hub", "double"),
    ("betweenness", "double"),
    ("community", "int"),
    ("communication_lang", "string"),
    ("profile_lang", "string"),
)


def export_graphml(
    graph: UndirectedGraph,
    authority: Mapping[str, float],
    hub: Mapping[str, float],
    betweenness: Mapping[str, float],
    community: Mapping[str, int],
    communication_lang: Mapping[str, str],
    profile_lang: Mapping[str, str],
) -> bytes:
    """Serialize the network with node attributes from the given mappings.

    Every node must be present in every mapping; a gap means the caller
    wired stages from different runs together, which is an error here
    rather than a silent default in the output.
    """
    attrs = {
        "authority": authority,
        "hub": hub,
        "betweenness": betweenness,
        "community": community,
        "communication_lang": communication_lang,
        "profile_lang": profile_lang,
    }
    for name, mapping in attrs.items():
        missing = [node for node in graph.nodes() if node not in mapping]
        if missing:
            raise ValueError(f"node {missing[0]!r} has no {name} value")

    root = ET.Element("graphml", xmlns=_GRAPHML_NS)
    for key_id, (name, kind) in enumerate(_NODE_KEYS):
        ET.SubElement(
            root,
            "key",
            id=f"d{key_id}",
            attrib={"for": "node", "attr.name": name, "attr.type": kind},
        )
    ET.SubElement(
        root,
        "key",
        id="e0",
        attrib={"for": "edge", "attr.name": "coefficient", "attr.type": "double"},
    )
    graph_el = ET.SubElement(root, "graph", id="spreaders", edgedefault="undirected")

    def fmt(value) -> str:
        return repr(value) if isinstance(value, float) else str(value)

    for node in graph.nodes():
        node_el = ET.SubElement(graph_el, "node", id=str(node))
        for key_id, (name, _) in enumerate(_NODE_KEYS):
            data = ET.SubElement(node_el, "data", key=f"d{key_id}")
            data.text = fmt(attrs[name][node])
    for u, v, weight in graph.edges():
        edge_el = ET.SubElement(graph_el, "edge", source=str(u), target=str(v))
        data = ET.SubElement(edge_el, "data", key="e0")
        data.text = repr(float(weight))

    tree = ET.ElementTree(root)
    ET.indent(tree)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True) + b"\n"
