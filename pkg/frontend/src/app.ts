// Application shell: fetches the analysis document, keeps the view state in
// the URL hash, and swaps between the overview and detail views. The
// document itself is never mutated.

import { renderDetail } from "./detail";
import { renderOverview } from "./overview";
import { decodeHash, encodeHash, EMPTY_STATE, ViewState } from "./state";
import { parseDocument, SchemaMismatchError, VineDocument } from "./types";

export class App {
  private doc: VineDocument | null = null;
  private state: ViewState = { ...EMPTY_STATE };

  constructor(private root: HTMLElement) {
    window.addEventListener("hashchange", () => {
      this.state = decodeHash(window.location.hash);
      this.render();
    });
  }

  async load(url = "/data.json"): Promise<void> {
    try {
      const resp = await fetch(url);
      if (!resp.ok) {
        this.renderError(`Could not fetch ${url}: HTTP ${resp.status}`);
        return;
      }
      this.setDocument(await resp.json());
    } catch (err) {
      this.renderError(`Could not load the analysis document: ${String(err)}`);
    }
  }

  setDocument(raw: unknown): void {
    try {
      this.doc = parseDocument(raw);
    } catch (err) {
      if (err instanceof SchemaMismatchError) {
        this.renderError(`Document schema mismatch: ${err.message}`);
        return;
      }
      throw err;
    }
    this.state = decodeHash(window.location.hash);
    this.render();
  }

  private setState(state: ViewState): void {
    this.state = state;
    const hash = encodeHash(state);
    if (window.location.hash !== hash) {
      // assigning reruns render via the hashchange listener
      window.location.hash = hash;
    } else {
      this.render();
    }
  }

  selectFeature(name: string | null): void {
    this.setState({ selectedFeature: name, expandedCluster: null });
  }

  toggleCluster(clusterId: number): void {
    const expanded = this.state.expandedCluster === clusterId ? null : clusterId;
    this.setState({ ...this.state, expandedCluster: expanded });
  }

  render(): void {
    if (!this.doc) return;
    this.root.replaceChildren();

    const header = document.createElement("header");
    const title = document.createElement("h1");
    title.textContent = `vine · ${this.doc.dataset.name}`;
    header.appendChild(title);
    if (this.state.selectedFeature !== null) {
      const back = document.createElement("button");
      back.className = "back-button";
      back.textContent = "← all features";
      back.addEventListener("click", () => this.selectFeature(null));
      header.appendChild(back);
    }
    this.root.appendChild(header);

    const view = document.createElement("main");
    this.root.appendChild(view);
    if (this.state.selectedFeature === null) {
      renderOverview(view, this.doc, {
        onSelect: (name) => this.selectFeature(name),
      });
    } else {
      renderDetail(view, this.doc, this.state.selectedFeature, {
        expandedCluster: this.state.expandedCluster,
        onToggleCluster: (id) => this.toggleCluster(id),
      });
    }
  }

  private renderError(message: string): void {
    this.root.replaceChildren();
    const banner = document.createElement("div");
    banner.className = "error-banner";
    banner.textContent = message;
    this.root.appendChild(banner);
  }
}
