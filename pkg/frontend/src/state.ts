/**
 * Client view state: current selections, active snapshots, and the
 * single active point-cloud filter.
 */

export type FilterKind = "book" | "label" | "subject";

export interface Filter {
  kind: FilterKind;
  value: string;
}

export interface ViewState {
  selectedManuscripts: string[];
  selectedImages: string[];
  selectedLabels: string[];
  activeProjectionId: string | null;
  activeGraphSnapshotId: string | null;
  filter: Filter | null;
  user: string;
}

export function initialState(user: string): ViewState {
  return {
    selectedManuscripts: [],
    selectedImages: [],
    selectedLabels: [],
    activeProjectionId: null,
    activeGraphSnapshotId: null,
    filter: null,
    user,
  };
}

/** Only one filter may be active at a time: setting a new one replaces
 * the previous, setting null clears. */
export function withFilter(state: ViewState, filter: Filter | null): ViewState {
  return { ...state, filter };
}

export function withSelections(
  state: ViewState,
  patch: Partial<Pick<ViewState, "selectedManuscripts" | "selectedImages" | "selectedLabels">>,
): ViewState {
  return { ...state, ...patch };
}

export interface ImageMeta {
  id: string;
  book: string | null;
  subject: string | null;
  label_ids: string[];
}

/** Apply the active filter to an image list (client-side narrowing of an
 * already-fetched selection; no scores involved). */
export function applyFilter(images: ImageMeta[], filter: Filter | null): ImageMeta[] {
  if (!filter) return images;
  switch (filter.kind) {
    case "book":
      return images.filter((img) => img.book === filter.value);
    case "subject":
      return images.filter((img) => img.subject === filter.value);
    case "label":
      return images.filter((img) => img.label_ids.includes(filter.value));
  }
}
