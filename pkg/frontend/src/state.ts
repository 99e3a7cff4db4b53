// View state lives in the URL hash so views are shareable links.
// An expanded cluster only makes sense inside a selected feature.

export interface ViewState {
  selectedFeature: string | null;
  expandedCluster: number | null;
}

export const EMPTY_STATE: ViewState = { selectedFeature: null, expandedCluster: null };

export function encodeHash(state: ViewState): string {
  if (state.selectedFeature === null) return "";
  const params = new URLSearchParams();
  params.set("f", state.selectedFeature);
  if (state.expandedCluster !== null) {
    params.set("c", String(state.expandedCluster));
  }
  return "#" + params.toString();
}

export function decodeHash(hash: string): ViewState {
  const raw = hash.startsWith("#") ? hash.slice(1) : hash;
  if (!raw) return { ...EMPTY_STATE };
  const params = new URLSearchParams(raw);
  const feature = params.get("f");
  if (feature === null || feature === "") return { ...EMPTY_STATE };
  const clusterRaw = params.get("c");
  let cluster: number | null = null;
  if (clusterRaw !== null && /^\d+$/.test(clusterRaw)) {
    cluster = Number(clusterRaw);
  }
  return { selectedFeature: feature, expandedCluster: cluster };
}
