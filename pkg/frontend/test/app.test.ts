import { beforeEach, describe, expect, it } from "vitest";

import { App } from "../src/app";
import { fixtureDocument } from "./fixture";

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

describe("App", () => {
  beforeEach(async () => {
    window.location.hash = "";
    await flush();
    document.body.replaceChildren();
  });

  it("starts on the overview and drills into a feature on click", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new App(root);
    app.setDocument(fixtureDocument());
    expect(root.querySelectorAll("g.thumbnail")).toHaveLength(3);

    root
      .querySelector('g.thumbnail[data-feature="temp"]')!
      .dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await flush();
    expect(window.location.hash).toBe("#f=temp");
    expect(root.querySelector("h2")!.textContent).toBe("temp");

    root.querySelector<HTMLButtonElement>(".back-button")!.click();
    await flush();
    expect(root.querySelectorAll("g.thumbnail")).toHaveLength(3);
  });

  it("toggles a cluster's ICE curves on click and click-again", async () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new App(root);
    app.setDocument(fixtureDocument());
    app.selectFeature("temp");
    await flush();

    root
      .querySelectorAll(".vine-curve")[0]
      .dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await flush();
    expect(window.location.hash).toBe("#f=temp&c=0");
    expect(root.querySelectorAll(".ice-curve").length).toBeGreaterThan(0);

    root
      .querySelectorAll(".vine-curve")[0]
      .dispatchEvent(new MouseEvent("click", { bubbles: true }));
    await flush();
    expect(root.querySelectorAll(".ice-curve")).toHaveLength(0);
  });

  it("restores state from the URL hash", async () => {
    window.location.hash = "#f=workday";
    await flush();
    const root = document.createElement("div");
    document.body.appendChild(root);
    new App(root).setDocument(fixtureDocument());
    expect(root.querySelector("h2")!.textContent).toBe("workday");
  });

  it("shows a banner on a schema mismatch", () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const doc = fixtureDocument() as { schema_version: string };
    doc.schema_version = "vine/99";
    new App(root).setDocument(doc);
    const banner = root.querySelector(".error-banner");
    expect(banner).not.toBeNull();
    expect(banner!.textContent).toContain("vine/99");
  });

  it("tolerates unknown extra fields in the document", () => {
    const root = document.createElement("div");
    document.body.appendChild(root);
    const doc = fixtureDocument() as Record<string, unknown>;
    doc["future_field"] = { nested: [1, 2, 3] };
    new App(root).setDocument(doc);
    expect(root.querySelectorAll("g.thumbnail")).toHaveLength(3);
  });
});
