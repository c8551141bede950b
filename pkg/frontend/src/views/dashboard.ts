/**
 * Category dashboard: one image, up to three of its labels, and the
 * three-way descriptive / decorative / interpretive choice per label.
 */

import { ImageRecordPayload, LabelInfo } from "../api.js";
import { VNode, h } from "../vdom.js";

export const CATEGORIES = ["descriptive", "decorative", "interpretive"] as const;

export interface DashboardActions {
  categorize(labelId: string, category: string): void;
  skipImage(): void;
}

export interface DashboardProps {
  image: ImageRecordPayload | null; // null when no labeled image remains
  labels: LabelInfo[]; // at most three, all carried by the image
}

export function pickDashboardLabels(image: ImageRecordPayload, index: Record<string, LabelInfo>): LabelInfo[] {
  return image.label_ids
    .map((id) => index[id])
    .filter((label): label is LabelInfo => label !== undefined)
    .slice(0, 3);
}

export function categoryDashboardView(props: DashboardProps, actions: DashboardActions): VNode {
  if (!props.image || props.labels.length === 0) {
    return h("div", { class: "category-dashboard empty" }, [
      h("p", {}, ["no labeled image to categorize"]),
    ]);
  }
  const image = props.image;
  return h("div", { class: "category-dashboard", "data-image": image.id }, [
    h("div", { class: "dashboard-image" }, [
      image.image_uri ? h("img", { src: image.image_uri, alt: image.id }) : image.id,
    ]),
    h(
      "div",
      { class: "dashboard-labels" },
      props.labels.map((label) =>
        h("div", { class: "dashboard-label", "data-label": label.id }, [
          h("span", { class: "label-name" }, [label.surface]),
          h(
            "span",
            { class: "category-buttons" },
            CATEGORIES.map((category) =>
              h(
                "button",
                {
                  class: label.category === category ? "category current" : "category",
                  "data-category": category,
                },
                [category],
                { click: () => actions.categorize(label.id, category) },
              ),
            ),
          ),
        ]),
      ),
    ),
    h("button", { class: "skip" }, ["next image"], { click: () => actions.skipImage() }),
  ]);
}
