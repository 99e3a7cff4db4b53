// Document model for the "vine/1" analysis JSON. Parsing is tolerant of
// unknown fields so newer engines can add data without breaking this UI.

export interface HistogramData {
  bin_edges: number[];
  counts: number[];
}

export interface DatasetFeature {
  name: string;
  display_name?: string;
  kind: string;
  min: number;
  max: number;
  histogram: HistogramData;
}

export interface PredicateInfo {
  feature: string;
  feature_index?: number;
  direction: "<=" | ">";
  value: number;
  text: string;
}

export interface CurveMetrics {
  accuracy: number;
  precision: number;
  recall: number;
  f1: number;
  cluster_size: number;
  matched_size: number;
}

export interface MemberHistogram {
  bin_edges: number[];
  in_region: number[];
  out_region: number[];
}

export interface VineCurve {
  id: number;
  size: number;
  centroid: number[];
  predicate: PredicateInfo;
  metrics: CurveMetrics;
  member_histograms?: Record<string, MemberHistogram>;
}

export interface IceSampleEntry {
  row: number;
  cluster: number;
  curve: number[];
}

export interface FeatureScores {
  importance: number;
  interaction_strength: number;
}

export interface FeatureAnalysis {
  name: string;
  feature_index: number;
  grid: number[];
  pdp: number[];
  scores: FeatureScores;
  vine_curves: VineCurve[];
  ice_sample: IceSampleEntry[];
}

export interface VineDocument {
  schema_version: string;
  dataset: { name: string; n: number; features: DatasetFeature[] };
  mean_prediction: number;
  features: FeatureAnalysis[];
}

export const SCHEMA_VERSION = "vine/1";

export class SchemaMismatchError extends Error {}

export function parseDocument(raw: unknown): VineDocument {
  if (typeof raw !== "object" || raw === null) {
    throw new SchemaMismatchError("document is not a JSON object");
  }
  const doc = raw as Partial<VineDocument>;
  if (doc.schema_version !== SCHEMA_VERSION) {
    throw new SchemaMismatchError(
      `expected schema_version "${SCHEMA_VERSION}", got "${String(doc.schema_version)}"`,
    );
  }
  if (!doc.dataset || !Array.isArray(doc.features) || typeof doc.mean_prediction !== "number") {
    throw new SchemaMismatchError("document is missing dataset, features, or mean_prediction");
  }
  return doc as VineDocument;
}

export function isBinaryFeature(feature: FeatureAnalysis): boolean {
  return feature.grid.length === 2 && feature.grid[0] === 0 && feature.grid[1] === 1;
}
