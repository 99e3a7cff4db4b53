// Collision relaxation for the overview thumbnails: nudge overlapping boxes
// apart while staying close to their score-derived positions.

export interface LayoutNode {
  x: number;
  y: number;
  halfWidth: number;
  halfHeight: number;
}

export interface RelaxOptions {
  iterations?: number;
  padding?: number;
  bounds?: { width: number; height: number };
}

export function relaxCollisions(nodes: LayoutNode[], options: RelaxOptions = {}): void {
  const iterations = options.iterations ?? 80;
  const padding = options.padding ?? 4;
  const bounds = options.bounds;

  const clamp = () => {
    if (!bounds) return;
    for (const node of nodes) {
      node.x = Math.min(Math.max(node.x, node.halfWidth), bounds.width - node.halfWidth);
      node.y = Math.min(Math.max(node.y, node.halfHeight), bounds.height - node.halfHeight);
    }
  };

  for (let it = 0; it < iterations; it++) {
    let moved = false;
    for (let i = 0; i < nodes.length; i++) {
      for (let j = i + 1; j < nodes.length; j++) {
        const a = nodes[i];
        const b = nodes[j];
        const needX = a.halfWidth + b.halfWidth + padding;
        const needY = a.halfHeight + b.halfHeight + padding;
        let dx = b.x - a.x;
        let dy = b.y - a.y;
        const overlapX = needX - Math.abs(dx);
        const overlapY = needY - Math.abs(dy);
        if (overlapX <= 0 || overlapY <= 0) continue;
        moved = true;
        if (dx === 0 && dy === 0) {
          // coincident nodes: deterministic split direction by index order
          dy = j % 2 === 0 ? 1 : -1;
        }
        // resolve along the axis of least separation work
        if (overlapX < overlapY && dx !== 0) {
          const push = (overlapX / 2) * Math.sign(dx);
          a.x -= push;
          b.x += push;
        } else {
          const push = (overlapY / 2) * (dy === 0 ? 1 : Math.sign(dy));
          a.y -= push;
          b.y += push;
        }
      }
    }
    // clamping inside the loop lets the next sweep undo wall pile-ups
    clamp();
    if (!moved) break;
  }
}

/** Smallest horizontal or vertical gap between two boxes (negative = overlap). */
export function boxGap(a: LayoutNode, b: LayoutNode): number {
  const gapX = Math.abs(b.x - a.x) - (a.halfWidth + b.halfWidth);
  const gapY = Math.abs(b.y - a.y) - (a.halfHeight + b.halfHeight);
  return Math.max(gapX, gapY);
}
