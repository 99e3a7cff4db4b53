// Feature-space overview: one small-multiple thumbnail per feature, placed
// by (interaction strength, importance) and relaxed to avoid overplotting.

import { LayoutNode, relaxCollisions } from "./force";
import { clusterColor, PDP_COLOR, strokeWidth } from "./palette";
import { extent, linearScale, polylinePoints, svgElement } from "./scales";
import { FeatureAnalysis, isBinaryFeature, VineDocument } from "./types";

export interface OverviewOptions {
  width?: number;
  height?: number;
  onSelect?: (feature: string) => void;
}

const THUMB_W = 96;
const THUMB_H = 64;

export function renderOverview(
  container: HTMLElement,
  doc: VineDocument,
  options: OverviewOptions = {},
): void {
  const width = options.width ?? 900;
  const height = options.height ?? 560;
  container.replaceChildren();

  if (doc.features.length === 0) {
    const empty = document.createElement("p");
    empty.className = "empty-state";
    empty.textContent = "This document contains no analyzed features.";
    container.appendChild(empty);
    return;
  }

  const svg = svgElement("svg", {
    width,
    height,
    class: "overview",
    viewBox: `0 0 ${width} ${height}`,
  });

  const xs = doc.features.map((f) => f.scores.interaction_strength);
  const ys = doc.features.map((f) => f.scores.importance);
  const xScale = linearScale([0, Math.max(...xs, 1e-12)], [THUMB_W / 2 + 8, width - THUMB_W / 2 - 8]);
  const yScale = linearScale([0, Math.max(...ys, 1e-12)], [height - THUMB_H / 2 - 24, THUMB_H / 2 + 8]);

  const nodes: LayoutNode[] = doc.features.map((f) => ({
    x: xScale(f.scores.interaction_strength),
    y: yScale(f.scores.importance),
    halfWidth: THUMB_W / 2,
    halfHeight: THUMB_H / 2,
  }));
  relaxCollisions(nodes, { padding: 4, bounds: { width, height } });

  doc.features.forEach((feature, i) => {
    svg.appendChild(thumbnail(feature, nodes[i], options.onSelect));
  });

  const xLabel = svgElement("text", {
    x: width / 2,
    y: height - 6,
    "text-anchor": "middle",
    class: "axis-label",
  });
  xLabel.textContent = "interaction strength →";
  svg.appendChild(xLabel);
  const yLabel = svgElement("text", {
    x: 12,
    y: height / 2,
    "text-anchor": "middle",
    transform: `rotate(-90 12 ${height / 2})`,
    class: "axis-label",
  });
  yLabel.textContent = "feature importance →";
  svg.appendChild(yLabel);

  container.appendChild(svg);
}

function thumbnail(
  feature: FeatureAnalysis,
  node: LayoutNode,
  onSelect?: (feature: string) => void,
): SVGGElement {
  const group = svgElement("g", {
    class: "thumbnail",
    "data-feature": feature.name,
    transform: `translate(${node.x - THUMB_W / 2} ${node.y - THUMB_H / 2})`,
  });
  group.appendChild(
    svgElement("rect", {
      width: THUMB_W,
      height: THUMB_H,
      rx: 4,
      class: "thumbnail-frame",
      fill: "#ffffff",
      stroke: "#cccccc",
    }),
  );

  const inner = { x0: 4, x1: THUMB_W - 4, y0: 16, y1: THUMB_H - 4 };
  const allValues: number[] = [...feature.pdp];
  for (const curve of feature.vine_curves) allValues.push(...curve.centroid);
  const sy = linearScale(extent(allValues), [inner.y1, inner.y0]);
  const sx = linearScale(extent(feature.grid), [inner.x0, inner.x1]);

  if (isBinaryFeature(feature)) {
    const bars = [feature.pdp[1] - feature.pdp[0], ...feature.vine_curves.map((c) => c.centroid[1] - c.centroid[0])];
    const deltas = extent([0, ...bars]);
    const sv = linearScale(deltas, [inner.y1, inner.y0]);
    const slot = (inner.x1 - inner.x0) / bars.length;
    bars.forEach((delta, i) => {
      const top = Math.min(sv(delta), sv(0));
      group.appendChild(
        svgElement("rect", {
          x: inner.x0 + i * slot + 2,
          y: top,
          width: Math.max(slot - 4, 2),
          height: Math.max(Math.abs(sv(delta) - sv(0)), 1),
          fill: i === 0 ? PDP_COLOR : clusterColor(feature.vine_curves[i - 1].id),
          class: i === 0 ? "thumb-pdp" : "thumb-vine",
        }),
      );
    });
  } else {
    for (const curve of feature.vine_curves) {
      group.appendChild(
        svgElement("polyline", {
          points: polylinePoints(feature.grid, curve.centroid, sx, sy),
          fill: "none",
          stroke: clusterColor(curve.id),
          "stroke-width": Math.min(strokeWidth(curve.size), 3),
          class: "thumb-vine",
        }),
      );
    }
    group.appendChild(
      svgElement("polyline", {
        points: polylinePoints(feature.grid, feature.pdp, sx, sy),
        fill: "none",
        stroke: PDP_COLOR,
        "stroke-width": 1.5,
        class: "thumb-pdp",
      }),
    );
  }

  const label = svgElement("text", { x: THUMB_W / 2, y: 12, "text-anchor": "middle", class: "thumb-title" });
  label.textContent = feature.name;
  group.appendChild(label);

  if (onSelect) {
    group.addEventListener("click", () => onSelect(feature.name));
  }
  return group;
}
