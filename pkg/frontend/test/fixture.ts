// Schema-valid document with the three shapes the UI must handle: a numeric
// feature with clusters, a numeric feature with none, and a binary feature.

export function fixtureDocument() {
  return {
    schema_version: "vine/1",
    dataset: {
      name: "ride-sharing",
      n: 200,
      features: [
        {
          name: "temp",
          display_name: "Temperature",
          kind: "numeric",
          source_column: null,
          min: 0,
          max: 40,
          histogram: { bin_edges: [0, 10, 20, 30, 40], counts: [30, 70, 60, 40] },
        },
        {
          name: "hour",
          display_name: "Hour of Day",
          kind: "ordinal",
          source_column: null,
          min: 0,
          max: 23,
          histogram: { bin_edges: [0, 6, 12, 18, 24], counts: [50, 50, 50, 50] },
        },
        {
          name: "workday",
          display_name: "Work Day",
          kind: "binary",
          source_column: null,
          min: 0,
          max: 1,
          histogram: { bin_edges: [0, 0.5, 1], counts: [57, 143] },
        },
      ],
    },
    mean_prediction: 180.5,
    features: [
      {
        name: "temp",
        feature_index: 0,
        grid: [0, 10, 20, 30, 40],
        pdp: [-30, -10, 15, 25, 10],
        scores: { importance: 20.3, interaction_strength: 5.1 },
        vine_curves: [
          {
            id: 0,
            size: 120,
            centroid: [-45, -20, 30, 55, 40],
            predicate: {
              feature: "workday",
              feature_index: 2,
              direction: ">",
              value: 0.5,
              text: "Work Day > 0.5",
            },
            metrics: {
              accuracy: 0.93,
              precision: 0.91,
              recall: 0.9,
              f1: 0.905,
              cluster_size: 120,
              matched_size: 118,
            },
            member_histograms: {
              workday: { bin_edges: [0, 0.5, 1], in_region: [0, 112], out_region: [8, 0] },
            },
          },
          {
            id: 1,
            size: 45,
            centroid: [-5, -2, 0, 1, 2],
            predicate: {
              feature: "hour",
              feature_index: 1,
              direction: "<=",
              value: 6.5,
              text: "Hour of Day <= 6.5",
            },
            metrics: {
              accuracy: 0.88,
              precision: 0.8,
              recall: 0.85,
              f1: 0.824,
              cluster_size: 45,
              matched_size: 48,
            },
            member_histograms: {
              hour: { bin_edges: [0, 6, 12, 18, 24], in_region: [40, 2, 0, 0], out_region: [0, 1, 1, 1] },
            },
          },
        ],
        ice_sample: [
          { row: 3, cluster: 0, curve: [-48, -22, 29, 54, 41] },
          { row: 11, cluster: 0, curve: [-42, -18, 31, 56, 39] },
          { row: 57, cluster: 1, curve: [-5.5, -2.2, 0.1, 1.2, 2.1] },
        ],
      },
      {
        name: "hour",
        feature_index: 1,
        grid: [0, 6, 12, 18, 23],
        pdp: [-20, -5, 30, 25, -10],
        scores: { importance: 21.7, interaction_strength: 0 },
        vine_curves: [],
        ice_sample: [],
      },
      {
        name: "workday",
        feature_index: 2,
        grid: [0, 1],
        pdp: [-12, 5],
        scores: { importance: 8.5, interaction_strength: 3.2 },
        vine_curves: [
          {
            id: 0,
            size: 38,
            centroid: [-30, 22],
            predicate: {
              feature: "workday",
              feature_index: 2,
              direction: ">",
              value: 0.5,
              text: "Work Day > 0.5",
            },
            metrics: {
              accuracy: 0.9,
              precision: 0.86,
              recall: 0.9,
              f1: 0.88,
              cluster_size: 38,
              matched_size: 40,
            },
            member_histograms: {
              workday: { bin_edges: [0, 0.5, 1], in_region: [0, 33], out_region: [5, 0] },
            },
          },
        ],
        ice_sample: [{ row: 8, cluster: 0, curve: [-29, 23] }],
      },
    ],
  };
}
