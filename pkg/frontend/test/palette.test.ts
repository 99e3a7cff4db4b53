import { describe, expect, it } from "vitest";

import { clusterColor, PALETTE, PDP_COLOR, strokeWidth } from "../src/palette";

describe("strokeWidth", () => {
  it("is log scaled with the documented constants", () => {
    expect(strokeWidth(1)).toBe(1.5);
    expect(strokeWidth(10)).toBeCloseTo(3.0, 10);
    expect(strokeWidth(100)).toBeCloseTo(4.5, 10);
  });

  it("clamps to [1.5, 8]", () => {
    expect(strokeWidth(0)).toBe(1.5);
    expect(strokeWidth(10_000_000)).toBe(8);
  });
});

describe("clusterColor", () => {
  it("is stable for a given id", () => {
    expect(clusterColor(3)).toBe(clusterColor(3));
    expect(clusterColor(0)).not.toBe(clusterColor(1));
  });

  it("cycles through a 10-color palette that excludes black", () => {
    expect(PALETTE).toHaveLength(10);
    expect(PALETTE).not.toContain(PDP_COLOR);
    expect(clusterColor(12)).toBe(PALETTE[2]);
  });
});
