// Metadata tree: flatten the nested XML-derived structure into visible rows,
// preserving child order, honoring an expand/collapse set keyed by path.

import type { MetaNode } from "./types.js";

export interface TreeRow {
  path: string;
  depth: number;
  name: string;
  text: string;
  hasChildren: boolean;
  expanded: boolean;
}

export function flattenTree(root: MetaNode, expanded: Set<string>): TreeRow[] {
  const rows: TreeRow[] = [];
  const walk = (node: MetaNode, path: string, depth: number) => {
    const hasChildren = node.children.length > 0;
    const isOpen = expanded.has(path);
    rows.push({
      path,
      depth,
      name: node.name,
      text: node.text,
      hasChildren,
      expanded: isOpen,
    });
    if (hasChildren && isOpen) {
      node.children.forEach((child, i) => walk(child, `${path}/${i}:${child.name}`, depth + 1));
    }
  };
  walk(root, root.name, 0);
  return rows;
}

export function toggleNode(expanded: Set<string>, path: string): Set<string> {
  const next = new Set(expanded);
  if (next.has(path)) next.delete(path);
  else next.add(path);
  return next;
}

/** Paths of the root and its direct children, the sensible initial view. */
export function defaultExpansion(root: MetaNode): Set<string> {
  return new Set([root.name]);
}
