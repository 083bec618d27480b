"""Regular trees presented as finite labelled graphs.

A presentation has nodes with a label and two child references; a child
reference is another node id or a hole written "hole:<name>".  The tree
it denotes is the infinite unfolding from the root.  Trees with holes
are partial; holes mark where other trees can be plugged in.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

HOLE_PREFIX = "hole:"


class TreeError(ValueError):
    def __init__(self, issues: list[str] | str):
        if isinstance(issues, str):
            issues = [issues]
        self.issues = issues
        super().__init__("; ".join(issues))


@dataclass(frozen=True)
class TreeNode:
    label: str
    left: str
    right: str

    def child(self, direction: str) -> str:
        return self.left if direction == "L" else self.right


@dataclass(frozen=True)
class RegularTree:
    nodes: dict[str, TreeNode]
    root: str

    def node(self, node_id: str) -> TreeNode:
        return self.nodes[node_id]

    def __hash__(self) -> int:
        return hash((self.root, tuple(sorted(self.nodes))))


def is_hole_ref(ref: str) -> bool:
    return ref.startswith(HOLE_PREFIX)


def hole_name(ref: str) -> str:
    return ref[len(HOLE_PREFIX):]


def hole_ref(name: str) -> str:
    return HOLE_PREFIX + name


def holes(tree: RegularTree) -> set[str]:
    out = set()
    for node in tree.nodes.values():
        for ref in (node.left, node.right):
            if is_hole_ref(ref):
                out.add(hole_name(ref))
    return out


def is_total(tree: RegularTree) -> bool:
    return not holes(tree)


def labels_used(tree: RegularTree) -> set[str]:
    return {node.label for node in tree.nodes.values()}


def check(tree: RegularTree, alphabet: Iterable[str] | None = None) -> None:
    issues: list[str] = []
    if tree.root not in tree.nodes:
        issues.append(f"root {tree.root!r} is not a node")
    for nid, node in tree.nodes.items():
        for ref in (node.left, node.right):
            if not is_hole_ref(ref) and ref not in tree.nodes:
                issues.append(f"node {nid} references unknown node {ref!r}")
    if not issues:
        seen = reachable_nodes(tree)
        unreachable = set(tree.nodes) - seen
        if unreachable:
            issues.append(f"unreachable nodes: {sorted(unreachable)}")
    if alphabet is not None:
        bad = labels_used(tree) - set(alphabet)
        if bad:
            issues.append(f"labels outside the alphabet: {sorted(bad)}")
    if issues:
        raise TreeError(issues)


def reachable_nodes(tree: RegularTree) -> set[str]:
    seen = set()
    stack = [tree.root]
    while stack:
        nid = stack.pop()
        if nid in seen or nid not in tree.nodes:
            continue
        seen.add(nid)
        node = tree.nodes[nid]
        for ref in (node.left, node.right):
            if not is_hole_ref(ref):
                stack.append(ref)
    return seen


def make_tree(nodes: Mapping[str, tuple[str, str, str]], root: str) -> RegularTree:
    """Build from {id: (label, left, right)} and validate."""
    tree = RegularTree(
        nodes={nid: TreeNode(*spec) for nid, spec in nodes.items()}, root=root
    )
    check(tree)
    return tree


def constant_tree(label: str, node_id: str = "n0") -> RegularTree:
    return make_tree({node_id: (label, node_id, node_id)}, node_id)


def plug(tree: RegularTree, name: str, sub: RegularTree) -> RegularTree:
    """Replace the hole `name` by `sub`; nodes of `sub` are renamed when
    they collide."""
    if name not in holes(tree):
        raise TreeError(f"no hole named {name!r}")
    taken = set(tree.nodes)
    rename: dict[str, str] = {}
    for nid in sub.nodes:
        new = nid
        while new in taken:
            new = new + "'"
        rename[nid] = new
        taken.add(new)

    def fix_sub_ref(ref: str) -> str:
        if is_hole_ref(ref):
            return ref
        return rename[ref]

    merged = {}
    target = hole_ref(name)
    for nid, node in tree.nodes.items():
        merged[nid] = TreeNode(
            node.label,
            rename[sub.root] if node.left == target else node.left,
            rename[sub.root] if node.right == target else node.right,
        )
    for nid, node in sub.nodes.items():
        merged[rename[nid]] = TreeNode(node.label, fix_sub_ref(node.left), fix_sub_ref(node.right))
    out = RegularTree(nodes=merged, root=tree.root)
    reach = reachable_nodes(out)
    out = RegularTree(
        nodes={nid: n for nid, n in out.nodes.items() if nid in reach}, root=out.root
    )
    check(out)
    return out


def subtree_at(tree: RegularTree, word: str) -> RegularTree:
    """The subtree rooted at the node reached by a word over {L, R}."""
    cur = tree.root
    for d in word:
        node = tree.nodes[cur]
        ref = node.child(d)
        if is_hole_ref(ref):
            raise TreeError(f"descent {word!r} falls into hole {hole_name(ref)!r}")
        cur = ref
    reach = set()
    stack = [cur]
    while stack:
        nid = stack.pop()
        if nid in reach:
            continue
        reach.add(nid)
        for ref in (tree.nodes[nid].left, tree.nodes[nid].right):
            if not is_hole_ref(ref):
                stack.append(ref)
    return RegularTree(nodes={nid: tree.nodes[nid] for nid in reach}, root=cur)


def trace_tree(trace: list[str]) -> RegularTree:
    """The partial tree of a trace.

    A trace alternates letters and directions, starting with a letter:
    [a0, d0, a1, d1, ...].  A trace ending with a letter is labelled,
    ending with a direction unlabelled.  Nodes along the trace get the
    given labels; every child off the trace, and the children of the
    final labelled node, are holes with distinct names.
    """
    if not trace:
        raise TreeError("empty trace")
    for i, tok in enumerate(trace):
        if i % 2 == 0:
            if tok in ("L", "R"):
                raise TreeError(f"position {i} of the trace must be a letter")
        else:
            if tok not in ("L", "R"):
                raise TreeError(f"position {i} of the trace must be L or R")
    nodes: dict[str, TreeNode] = {}
    letters = trace[0::2]
    dirs = trace[1::2]
    count = len(letters)
    for i in range(count):
        nid = f"n{i}"
        off = f"hole:off{i}"
        if i < len(dirs):
            follow = f"n{i + 1}" if i + 1 < count else "hole:end"
            left = follow if dirs[i] == "L" else off
            right = off if dirs[i] == "L" else follow
        else:
            left = "hole:end-L"
            right = "hole:end-R"
        nodes[nid] = TreeNode(letters[i], left, right)
    tree = RegularTree(nodes=nodes, root="n0")
    check(tree)
    return tree


def unfold_equal(s: RegularTree, t: RegularTree) -> bool:
    """Do two presentations denote the same (partial) tree?  Bisimulation
    over reachable node pairs."""
    seen: set[tuple[str, str]] = set()
    stack = [(s.root, t.root)]
    while stack:
        a, b = stack.pop()
        if (a, b) in seen:
            continue
        seen.add((a, b))
        na, nb = s.nodes[a], t.nodes[b]
        if na.label != nb.label:
            return False
        for ra, rb in ((na.left, nb.left), (na.right, nb.right)):
            ha, hb = is_hole_ref(ra), is_hole_ref(rb)
            if ha != hb:
                return False
            if ha:
                if ra != rb:
                    return False
            else:
                stack.append((ra, rb))
    return True


def to_json_dict(tree: RegularTree) -> dict:
    return {
        "nodes": [
            {"id": nid, "label": n.label, "left": n.left, "right": n.right}
            for nid, n in sorted(tree.nodes.items())
        ],
        "root": tree.root,
    }


def dumps(tree: RegularTree) -> str:
    return json.dumps(to_json_dict(tree), indent=2, sort_keys=False) + "\n"


def from_json_dict(data: object) -> RegularTree:
    if not isinstance(data, dict):
        raise TreeError("tree description must be an object")
    raw_nodes = data.get("nodes")
    root = data.get("root")
    if not isinstance(raw_nodes, list):
        raise TreeError("'nodes' must be a list")
    nodes = {}
    issues = []
    for entry in raw_nodes:
        if not isinstance(entry, dict) or not {"id", "label", "left", "right"} <= set(entry):
            issues.append(f"node entry needs id/label/left/right: {entry!r}")
            continue
        if entry["id"] in nodes:
            issues.append(f"duplicate node id {entry['id']!r}")
        nodes[entry["id"]] = TreeNode(entry["label"], entry["left"], entry["right"])
    if not isinstance(root, str):
        issues.append("'root' must be a string")
    if issues:
        raise TreeError(issues)
    tree = RegularTree(nodes=nodes, root=root)
    check(tree)
    return tree


def loads(text: str) -> RegularTree:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise TreeError(f"not valid JSON: {err}") from err
    return from_json_dict(data)


def load(path: str) -> RegularTree:
    with open(path) as fh:
        return loads(fh.read())
