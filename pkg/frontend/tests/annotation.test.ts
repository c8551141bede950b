/**
 * Thin-client acceptance for the annotation matrix: with the API
 * mocked, every rendered score and count equals the mocked payload, and
 * every UI mutation produces exactly one history entry.
 */

import { describe, expect, it } from "vitest";

import { AnnotationController } from "../src/controller.js";
import { byClass, findAll, textOf } from "../src/vdom.js";
import { annotationMatrixView } from "../src/views/annotation.js";
import { MockApi, standardData } from "./mock.js";

async function openController(api: MockApi): Promise<AnnotationController> {
  const controller = new AnnotationController(api, "tester");
  await controller.open(["img1", "img2", "img3"]);
  await controller.selectLabel("l-bird");
  return controller;
}

describe("annotation matrix thin-client contract", () => {
  it("renders frequency counts verbatim from the payload", async () => {
    const api = new MockApi(standardData());
    const controller = await openController(api);
    const tree = annotationMatrixView(controller.props(), controller.actions());

    const bars = byClass(tree, "freq-bar");
    const byLabel: Record<string, { a: number; b: number }> = {};
    const rows = byClass(tree, "matrix-row");
    for (const row of rows) {
      const bar = byClass(row, "freq-bar")[0];
      byLabel[String(row.attrs["data-label"])] = {
        a: Number(bar.attrs["data-count-a"]),
        b: Number(bar.attrs["data-count-b"]),
      };
    }
    expect(bars.length).toBe(rows.length);
    expect(byLabel["l-bird"]).toEqual({ a: 7, b: 0 });
    expect(byLabel["l-crane"]).toEqual({ a: 2, b: 5 });
    expect(byLabel["l-bed"]).toEqual({ a: 0, b: 3 });
  });

  it("renders word-space scores verbatim and sorted on the axis", async () => {
    const api = new MockApi(standardData());
    const controller = await openController(api);
    const tree = annotationMatrixView(controller.props(), controller.actions());

    const panel = byClass(tree, "word-space")[0];
    const recs = byClass(panel, "rec");
    const scores = recs.map((r) => [String(r.attrs["data-label"]), Number(r.attrs["data-score"])]);
    expect(scores).toEqual([
      ["new-harpe", 0.25],
      ["l-bed", 1.75],
    ]);
    // tooltip explains the nearest target, straight from the payload
    expect(recs[0].attrs["title"]).toContain("l bird");
  });

  it("renders co-occurrence totals and breakdown counts verbatim", async () => {
    const api = new MockApi(standardData());
    const controller = await openController(api);
    const tree = annotationMatrixView(controller.props(), controller.actions());

    const stackRows = byClass(tree, "stack-row");
    expect(stackRows.length).toBe(1);
    expect(Number(stackRows[0].attrs["data-score"])).toBe(5);
    const segments = byClass(stackRows[0], "stack-segment");
    expect(segments.map((s) => [String(s.attrs["data-selected"]), Number(s.attrs["data-count"])])).toEqual([
      ["l-bird", 3],
      ["l-bed", 2],
    ]);
  });

  it("renders neighbor-label scores verbatim", async () => {
    const api = new MockApi(standardData());
    const controller = await openController(api);
    const tree = annotationMatrixView(controller.props(), controller.actions());
    const panel = byClass(tree, "neighbor-labels")[0];
    const recs = byClass(panel, "rec");
    expect(recs.map((r) => [String(r.attrs["data-label"]), Number(r.attrs["data-score"])])).toEqual([
      ["l-bird", 2],
    ]);
  });

  it("never renders a number absent from the payloads", async () => {
    const api = new MockApi(standardData());
    const controller = await openController(api);
    const tree = annotationMatrixView(controller.props(), controller.actions());
    const allowed = new Set<number>();
    const data = api.data;
    for (const f of Object.values(data.frequencies)) {
      allowed.add(f.count_a);
      allowed.add(f.count_b);
    }
    for (const group of [data.wordSpace, data.cooccurrence, data.neighbors]) {
      for (const rec of group) {
        allowed.add(rec.score);
        for (const part of rec.explanation.breakdown ?? []) allowed.add(part.count);
      }
    }
    const numericAttrs = ["data-score", "data-count", "data-count-a", "data-count-b"];
    for (const node of findAll(tree, () => true)) {
      for (const attr of numericAttrs) {
        if (attr in node.attrs) {
          expect(allowed.has(Number(node.attrs[attr]))).toBe(true);
        }
      }
    }
  });

  it("marks circles from assignments and distinguishes new words", async () => {
    const api = new MockApi(standardData());
    const controller = await openController(api);
    const tree = annotationMatrixView(controller.props(), controller.actions());
    const filled = byClass(tree, "filled").map((c) => `${c.attrs["data-image"]}:${c.attrs["data-label"]}`);
    expect(filled.sort()).toEqual(["img1:l-bird", "img1:l-crane", "img2:l-bed"]);
    const newWords = byClass(tree, "new-word");
    expect(newWords.length).toBeGreaterThan(0);
    expect(newWords.every((w) => String(w.attrs["style"]).includes("color"))).toBe(true);
  });
});

describe("mutations append exactly one history entry", () => {
  it("clicking a matrix circle issues exactly one set_label call", async () => {
    const api = new MockApi(standardData());
    const controller = await openController(api);
    const tree = annotationMatrixView(controller.props(), controller.actions());
    const circle = byClass(tree, "circle").find(
      (c) => c.attrs["data-image"] === "img3" && c.attrs["data-label"] === "l-bird",
    )!;
    expect(circle.attrs["data-present"]).toBe(false);
    circle.on["click"]();
    await new Promise((resolve) => setTimeout(resolve, 0));
    expect(api.calls["setLabel"]).toBe(1);
    expect(api.historyLog.length).toBe(1);
  });

  it("toggle on, toggle off: one entry each", async () => {
    const api = new MockApi(standardData());
    const controller = await openController(api);

    expect(api.historyLog.length).toBe(0);
    await controller.toggleLabel("img3", "l-bird", true);
    expect(api.calls["setLabel"]).toBe(1);
    expect(api.historyLog.length).toBe(1);
    expect(api.historyLog[0].change).toMatchObject({
      type: "set_label",
      image_id: "img3",
      label_id: "l-bird",
      present: true,
    });

    await controller.toggleLabel("img3", "l-bird", false);
    expect(api.calls["setLabel"]).toBe(2);
    expect(api.historyLog.length).toBe(2);
  });

  it("label creation and categorization: one entry each", async () => {
    const api = new MockApi(standardData());
    const controller = await openController(api);
    await controller.createLabel("Pupitre");
    expect(api.historyLog.length).toBe(1);
    expect(api.historyLog[0].change.type).toBe("create_label");
    await api.categorize("l-bird", "descriptive", "tester");
    expect(api.historyLog.length).toBe(2);
  });

  it("mutations show up in the polled history within one cycle", async () => {
    const api = new MockApi(standardData());
    const controller = await openController(api);
    await controller.toggleLabel("img3", "l-crane", true);
    await controller.poll();
    expect(controller.history.map((e) => e.seq)).toContain(1);
    const tree = annotationMatrixView(controller.props(), controller.actions());
    const toggle = byClass(tree, "history-toggle")[0];
    expect(textOf(toggle)).toContain("1");
  });

  it("a refused mutation rolls back and appends nothing", async () => {
    const api = new MockApi(standardData());
    const controller = await openController(api);
    api.failNext = { code: "no_op_change", status: 409 };
    await controller.toggleLabel("img1", "l-bird", true);
    expect(api.historyLog.length).toBe(0);
    const image = controller.images.find((img) => img.id === "img1")!;
    expect(image.label_ids).toEqual(["l-bird", "l-crane"]); // rolled back
    const tree = annotationMatrixView(controller.props(), controller.actions());
    const banner = byClass(tree, "error-banner")[0];
    expect(textOf(banner)).toContain("no_op_change");
  });
});

describe("view-local behaviour", () => {
  it("hiding a label is a client-side filter only", async () => {
    const api = new MockApi(standardData());
    const controller = await openController(api);
    const before = api.historyLog.length;
    controller.actions().hideLabel("l-bed");
    const tree = annotationMatrixView(controller.props(), controller.actions());
    const rows = byClass(tree, "matrix-row").map((r) => r.attrs["data-label"]);
    expect(rows).not.toContain("l-bed");
    expect(api.historyLog.length).toBe(before);
  });

  it("frequency popup lists the carrier images from the API", async () => {
    const api = new MockApi(standardData());
    const controller = await openController(api);
    await controller.openFrequencyPopup("l-bird");
    const tree = annotationMatrixView(controller.props(), controller.actions());
    const popup = byClass(tree, "frequency-images")[0];
    const listed = findAll(popup, (n) => "data-image" in n.attrs).map((n) => n.attrs["data-image"]);
    expect(listed).toEqual(["img1"]);
  });
});
