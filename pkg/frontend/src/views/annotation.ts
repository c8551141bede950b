/**
 * Re-annotation space: the label/image circle matrix with per-dataset
 * frequency bars, plus the three recommendation panels (word space,
 * stacked co-occurrences, neighbor-image labels) and the history pop-up.
 *
 * Thin-client rule: every number shown here (scores, counts, frequencies)
 * is copied verbatim from an API payload into a data-* attribute; the
 * view computes only pixel positions.
 */

import {
  FrequencyPayload,
  HistoryEntry,
  ImageRecordPayload,
  LabelInfo,
  Recommendation,
} from "../api.js";
import { DATASET_COLORS, desaturated, stackColor } from "../palette.js";
import { VNode, h } from "../vdom.js";

export interface AnnotationActions {
  toggleLabel(imageId: string, labelId: string, present: boolean): void;
  selectLabel(labelId: string): void;
  hideLabel(labelId: string): void;
  openFrequencyPopup(labelId: string): void;
  openImagePopup(imageId: string): void;
  toggleHistory(): void;
  createLabel(surface: string): void;
}

export interface AnnotationMatrixProps {
  images: ImageRecordPayload[];
  rows: Array<{ label: LabelInfo; frequency: FrequencyPayload }>;
  selectedLabels: string[];
  hiddenLabels: string[];
  wordSpace: Recommendation[];
  cooccurrence: Recommendation[];
  neighbors: Recommendation[];
  history: HistoryEntry[];
  historyOpen: boolean;
  frequencyPopup: { labelId: string; images: ImageRecordPayload[] } | null;
  labelIndex: Record<string, LabelInfo>;
  error: string | null;
}

function labelText(props: AnnotationMatrixProps, labelId: string): string {
  return props.labelIndex[labelId]?.surface ?? labelId;
}

function originClass(origin: string): string {
  return origin === "new" ? "word new-word" : "word old-word";
}

function wordStyle(origin: string): string {
  const color = DATASET_COLORS[origin] ?? "#333333";
  // old words: washed-out background; new words: saturated font, no fill
  return origin === "new"
    ? `color: ${color};`
    : `color: #222; background-color: ${desaturated(color)};`;
}

function frequencyBar(row: { label: LabelInfo; frequency: FrequencyPayload }, actions: AnnotationActions): VNode {
  const { count_a, count_b } = row.frequency;
  return h(
    "div",
    { class: "freq-bar", "data-count-a": count_a, "data-count-b": count_b },
    [
      h("span", {
        class: "freq-a",
        style: `background:${DATASET_COLORS.A}; width:${count_a * 4}px;`,
      }),
      h("span", {
        class: "freq-b",
        style: `background:${DATASET_COLORS.B}; width:${count_b * 4}px;`,
      }),
    ],
    { click: () => actions.openFrequencyPopup(row.label.id) },
  );
}

function matrixRow(
  props: AnnotationMatrixProps,
  row: { label: LabelInfo; frequency: FrequencyPayload },
  actions: AnnotationActions,
): VNode {
  const selected = props.selectedLabels.includes(row.label.id);
  const cells: VNode[] = props.images.map((image) => {
    const present = image.label_ids.includes(row.label.id);
    return h(
      "span",
      {
        class: present ? "circle filled" : "circle empty",
        "data-image": image.id,
        "data-label": row.label.id,
        "data-present": present,
      },
      [],
      { click: () => actions.toggleLabel(image.id, row.label.id, !present) },
    );
  });
  return h("div", { class: selected ? "matrix-row selected" : "matrix-row", "data-label": row.label.id }, [
    h(
      "span",
      { class: originClass(row.label.dataset_origin), style: wordStyle(row.label.dataset_origin) },
      [labelText(props, row.label.id)],
      { click: () => actions.selectLabel(row.label.id) },
    ),
    frequencyBar(row, actions),
    h("span", { class: "row-cells" }, cells),
    h("button", { class: "hide-label" }, ["x"], { click: () => actions.hideLabel(row.label.id) }),
  ]);
}

function wordSpacePanel(
  props: AnnotationMatrixProps,
  recs: Recommendation[],
  cls: string,
  title: string,
): VNode {
  const maxScore = recs.length > 0 ? Math.max(...recs.map((r) => r.score)) : 1;
  const scale = maxScore > 0 ? 560 / maxScore : 0;
  return h("div", { class: cls }, [
    h("h3", {}, [title]),
    h(
      "div",
      { class: "axis" },
      recs.map((rec) => {
        const tooltip =
          rec.explanation.nearest_target !== undefined
            ? `closest to ${labelText(props, rec.explanation.nearest_target)}`
            : (rec.explanation.neighbor_images ?? []).join(", ");
        return h(
          "span",
          {
            class: `${originClass(rec.origin)} rec`,
            style: `${wordStyle(rec.origin)} left:${rec.score * scale}px;`,
            "data-label": rec.label_id,
            "data-score": rec.score,
            title: tooltip,
          },
          [labelText(props, rec.label_id)],
          { click: () => undefined },
        );
      }),
    ),
  ]);
}

function cooccurrencePanel(props: AnnotationMatrixProps, actions: AnnotationActions): VNode {
  return h("div", { class: "panel cooccurrence" }, [
    h("h3", {}, ["co-occurring labels"]),
    h(
      "div",
      { class: "stacks" },
      props.cooccurrence.map((rec) => {
        const breakdown = rec.explanation.breakdown ?? [];
        const segments = breakdown.map((part, position) =>
          h(
            "span",
            {
              class: "stack-segment",
              style: `background:${stackColor(position)}; width:${part.count * 6}px;`,
              "data-selected": part.selected,
              "data-count": part.count,
              title: `${labelText(props, part.selected)}: ${part.count}`,
            },
            [],
          ),
        );
        return h(
          "div",
          { class: "stack-row", "data-label": rec.label_id, "data-score": rec.score },
          [
            h(
              "span",
              { class: originClass(rec.origin), style: wordStyle(rec.origin) },
              [labelText(props, rec.label_id)],
              { click: () => actions.selectLabel(rec.label_id) },
            ),
            h("span", { class: "stack" }, segments),
          ],
        );
      }),
    ),
  ]);
}

function historyPopup(props: AnnotationMatrixProps, actions: AnnotationActions): VNode {
  return h("div", { class: "popup history" }, [
    h("h3", {}, ["history"]),
    h(
      "ul",
      {},
      props.history.map((entry) =>
        h("li", { "data-seq": entry.seq }, [
          `${entry.timestamp} ${entry.user}: ${describeChange(entry)}`,
        ]),
      ),
    ),
    h("button", { class: "close" }, ["close"], { click: () => actions.toggleHistory() }),
  ]);
}

export function describeChange(entry: HistoryEntry): string {
  const change = entry.change;
  switch (change.type) {
    case "set_label":
      return `${change.present ? "added" : "removed"} label ${change.label_id} ${
        change.present ? "to" : "from"
      } ${change.image_id}`;
    case "create_label":
      return `created label ${change.surface}`;
    case "categorize":
      return `categorized ${change.label_id} as ${change.category}`;
    case "hierarchy":
      if (change.op === "add_edge") return `linked ${change.parent} -> ${change.child}`;
      if (change.op === "remove_edge") return `unlinked ${change.parent} -> ${change.child}`;
      return `added hierarchy node ${change.node_id}`;
    default:
      return change.type;
  }
}

function frequencyPopup(props: AnnotationMatrixProps): VNode | null {
  if (!props.frequencyPopup) return null;
  const { labelId, images } = props.frequencyPopup;
  return h("div", { class: "popup frequency-images", "data-label": labelId }, [
    h("h3", {}, [`images carrying ${labelText(props, labelId)}`]),
    h(
      "ul",
      {},
      images.map((img) => h("li", { "data-image": img.id }, [img.image_uri ?? img.id])),
    ),
  ]);
}

export function annotationMatrixView(props: AnnotationMatrixProps, actions: AnnotationActions): VNode {
  const visibleRows = props.rows.filter((row) => !props.hiddenLabels.includes(row.label.id));
  const header = h(
    "div",
    { class: "matrix-header" },
    props.images.map((image) =>
      h(
        "span",
        { class: "image-cell", "data-image": image.id, title: image.folio },
        [image.image_uri ? h("img", { src: image.image_uri, alt: image.id }) : image.id],
        { click: () => actions.openImagePopup(image.id) },
      ),
    ),
  );
  const children: Array<VNode | string> = [
    props.error ? h("div", { class: "error-banner" }, [props.error]) : h("div", { class: "error-banner empty" }),
    header,
    h("div", { class: "matrix-body" }, visibleRows.map((row) => matrixRow(props, row, actions))),
    h("div", { class: "new-label" }, [
      h("input", { class: "new-label-input", placeholder: "new label" }),
      h("button", { class: "new-label-submit" }, ["add"], {
        click: () => actions.createLabel(""),
      }),
    ]),
    wordSpacePanel(props, props.wordSpace, "panel word-space", "similar words"),
    cooccurrencePanel(props, actions),
    wordSpacePanel(props, props.neighbors, "panel neighbor-labels", "labels of similar images"),
    h("button", { class: "history-toggle" }, [`history (${props.history.length})`], {
      click: () => actions.toggleHistory(),
    }),
  ];
  if (props.historyOpen) children.push(historyPopup(props, actions));
  const popup = frequencyPopup(props);
  if (popup) children.push(popup);
  return h("div", { class: "annotation-matrix" }, children);
}
