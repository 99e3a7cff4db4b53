// Enlarged per-feature view: black PDP plus colored regional curves (bars
// for binary features), with explanation histograms in a sidebar. Clicking
// a regional curve reveals its constituent ICE sample curves.

import { clusterColor, PDP_COLOR, shadePair, strokeWidth } from "./palette";
import { extent, linearScale, polylinePoints, Scale, svgElement } from "./scales";
import { FeatureAnalysis, isBinaryFeature, VineCurve, VineDocument } from "./types";

export interface DetailOptions {
  width?: number;
  height?: number;
  expandedCluster?: number | null;
  onToggleCluster?: (clusterId: number) => void;
}

export function renderDetail(
  container: HTMLElement,
  doc: VineDocument,
  featureName: string,
  options: DetailOptions = {},
): void {
  container.replaceChildren();
  const feature = doc.features.find((f) => f.name === featureName);
  if (!feature) {
    const missing = document.createElement("p");
    missing.className = "empty-state";
    missing.textContent = `Feature "${featureName}" is not in this document.`;
    container.appendChild(missing);
    return;
  }

  const width = options.width ?? 640;
  const height = options.height ?? 420;
  const wrapper = document.createElement("div");
  wrapper.className = "detail";

  const heading = document.createElement("h2");
  heading.textContent = feature.name;
  wrapper.appendChild(heading);

  const body = document.createElement("div");
  body.className = "detail-body";
  body.appendChild(mainChart(feature, width, height, options));
  if (feature.vine_curves.length > 0) {
    body.appendChild(sidebar(feature));
  }
  wrapper.appendChild(body);
  container.appendChild(wrapper);
}

function sharedYScale(feature: FeatureAnalysis, range: [number, number]): Scale {
  // one scale for every curve of the feature, so divergence reads truthfully;
  // includes the ICE sample so expanding a cluster does not rescale the plot
  const values: number[] = [...feature.pdp];
  for (const curve of feature.vine_curves) values.push(...curve.centroid);
  for (const entry of feature.ice_sample) values.push(...entry.curve);
  return linearScale(extent(values), range);
}

function mainChart(
  feature: FeatureAnalysis,
  width: number,
  height: number,
  options: DetailOptions,
): SVGSVGElement {
  const svg = svgElement("svg", {
    width,
    height,
    class: "detail-chart",
    viewBox: `0 0 ${width} ${height}`,
  });
  const margin = { left: 48, right: 12, top: 12, bottom: 32 };
  const sy = sharedYScale(feature, [height - margin.bottom, margin.top]);

  if (isBinaryFeature(feature)) {
    renderBars(svg, feature, width, height, margin, options);
    return svg;
  }

  const sx = linearScale(extent(feature.grid), [margin.left, width - margin.right]);
  const zero = sy(0);
  svg.appendChild(
    svgElement("line", {
      x1: margin.left,
      x2: width - margin.right,
      y1: zero,
      y2: zero,
      stroke: "#dddddd",
      class: "zero-line",
    }),
  );

  const expanded = options.expandedCluster ?? null;
  if (expanded !== null) {
    for (const entry of feature.ice_sample) {
      if (entry.cluster !== expanded) continue;
      svg.appendChild(
        svgElement("polyline", {
          points: polylinePoints(feature.grid, entry.curve, sx, sy),
          fill: "none",
          stroke: clusterColor(expanded),
          "stroke-width": 0.6,
          "stroke-opacity": 0.35,
          class: "ice-curve",
          "data-cluster": expanded,
          "data-row": entry.row,
        }),
      );
    }
  }

  for (const curve of feature.vine_curves) {
    const line = svgElement("polyline", {
      points: polylinePoints(feature.grid, curve.centroid, sx, sy),
      fill: "none",
      stroke: clusterColor(curve.id),
      "stroke-width": strokeWidth(curve.size),
      class: "vine-curve",
      "data-cluster": curve.id,
    });
    if (options.onToggleCluster) {
      const id = curve.id;
      line.addEventListener("click", () => options.onToggleCluster!(id));
    }
    svg.appendChild(line);
  }

  svg.appendChild(
    svgElement("polyline", {
      points: polylinePoints(feature.grid, feature.pdp, sx, sy),
      fill: "none",
      stroke: PDP_COLOR,
      "stroke-width": 2.5,
      class: "pdp-curve",
    }),
  );

  const xLabel = svgElement("text", {
    x: (margin.left + width - margin.right) / 2,
    y: height - 8,
    "text-anchor": "middle",
    class: "axis-label",
  });
  xLabel.textContent = feature.name;
  svg.appendChild(xLabel);
  const yLabel = svgElement("text", {
    x: 14,
    y: height / 2,
    "text-anchor": "middle",
    transform: `rotate(-90 14 ${height / 2})`,
    class: "axis-label",
  });
  yLabel.textContent = "change vs mean prediction";
  svg.appendChild(yLabel);
  return svg;
}

function renderBars(
  svg: SVGSVGElement,
  feature: FeatureAnalysis,
  width: number,
  height: number,
  margin: { left: number; right: number; top: number; bottom: number },
  options: DetailOptions,
): void {
  // a bar reads as the prediction change from flipping the feature 0 -> 1
  const bars: { delta: number; color: string; cls: string; cluster?: number }[] = [
    { delta: feature.pdp[1] - feature.pdp[0], color: PDP_COLOR, cls: "pdp-bar" },
  ];
  for (const curve of feature.vine_curves) {
    bars.push({
      delta: curve.centroid[1] - curve.centroid[0],
      color: clusterColor(curve.id),
      cls: "vine-bar",
      cluster: curve.id,
    });
  }
  const sv = linearScale(extent([0, ...bars.map((b) => b.delta)]), [height - margin.bottom, margin.top]);
  const slot = (width - margin.left - margin.right) / bars.length;
  bars.forEach((bar, i) => {
    const x = margin.left + i * slot + slot * 0.15;
    const rect = svgElement("rect", {
      x,
      y: Math.min(sv(bar.delta), sv(0)),
      width: slot * 0.7,
      height: Math.max(Math.abs(sv(bar.delta) - sv(0)), 1),
      fill: bar.color,
      class: bar.cls,
      ...(bar.cluster !== undefined ? { "data-cluster": bar.cluster } : {}),
    });
    if (bar.cluster !== undefined && options.onToggleCluster) {
      const id = bar.cluster;
      rect.addEventListener("click", () => options.onToggleCluster!(id));
    }
    svg.appendChild(rect);
  });
  const label = svgElement("text", {
    x: width / 2,
    y: height - 8,
    "text-anchor": "middle",
    class: "axis-label",
  });
  label.textContent = `${feature.name}: change from 0 to 1`;
  svg.appendChild(label);
}

function sidebar(feature: FeatureAnalysis): HTMLElement {
  const aside = document.createElement("aside");
  aside.className = "sidebar";
  for (const curve of feature.vine_curves) {
    aside.appendChild(explanationPanel(curve));
  }
  return aside;
}

function explanationPanel(curve: VineCurve): HTMLElement {
  const panel = document.createElement("div");
  panel.className = "explanation";
  panel.dataset.cluster = String(curve.id);

  const caption = document.createElement("div");
  caption.className = "explanation-caption";
  caption.textContent = `${curve.predicate.text} · n=${curve.size} · acc=${curve.metrics.accuracy.toFixed(2)}`;
  panel.appendChild(caption);

  const histograms = curve.member_histograms ?? {};
  const hist = histograms[curve.predicate.feature];
  if (hist) {
    panel.appendChild(histogramSvg(curve, hist.bin_edges, hist.in_region, hist.out_region));
  }
  return panel;
}

function histogramSvg(
  curve: VineCurve,
  edges: number[],
  inRegion: number[],
  outRegion: number[],
): SVGSVGElement {
  const width = 180;
  const height = 70;
  const svg = svgElement("svg", { width, height, class: "explanation-histogram" });
  const maxCount = Math.max(...inRegion, ...outRegion, 1);
  const sy = linearScale([0, maxCount], [height - 2, 2]);
  const sx = linearScale([edges[0], edges[edges.length - 1]], [2, width - 2]);
  const { dark, light } = shadePair(clusterColor(curve.id));
  for (let i = 0; i < inRegion.length; i++) {
    const x0 = sx(edges[i]);
    const x1 = sx(edges[i + 1]);
    const inCount = inRegion[i];
    const outCount = outRegion[i];
    const count = inCount + outCount;
    if (count === 0) continue;
    const inRegionBin = inCount >= outCount;
    svg.appendChild(
      svgElement("rect", {
        x: x0 + 0.5,
        y: sy(count),
        width: Math.max(x1 - x0 - 1, 1),
        height: (height - 2) - sy(count),
        fill: inRegionBin ? dark : light,
        class: inRegionBin ? "hist-bar-in" : "hist-bar-out",
        "data-bin": i,
      }),
    );
  }
  return svg;
}
