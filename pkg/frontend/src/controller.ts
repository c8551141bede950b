/**
 * Annotation-space controller: assembles view props from API payloads,
 * applies optimistic mutations with rollback on 4xx, and polls history.
 *
 * The controller stores payloads verbatim; it never recomputes a score
 * or count the server already provided.
 */

import {
  Api,
  ApiError,
  FrequencyPayload,
  HistoryEntry,
  ImageRecordPayload,
  LabelInfo,
  Recommendation,
} from "./api.js";
import { AnnotationActions, AnnotationMatrixProps } from "./views/annotation.js";

export class AnnotationController {
  images: ImageRecordPayload[] = [];
  rows: Array<{ label: LabelInfo; frequency: FrequencyPayload }> = [];
  labelIndex: Record<string, LabelInfo> = {};
  selectedLabels: string[] = [];
  hiddenLabels: string[] = [];
  wordSpace: Recommendation[] = [];
  cooccurrence: Recommendation[] = [];
  neighbors: Recommendation[] = [];
  history: HistoryEntry[] = [];
  historyOpen = false;
  frequencyPopup: { labelId: string; images: ImageRecordPayload[] } | null = null;
  error: string | null = null;
  lastSeq = 0;

  constructor(
    private api: Api,
    private user: string,
    private onChange: () => void = () => {},
  ) {}

  /** Load the matrix for a lasso selection of images. */
  async open(imageIds: string[]): Promise<void> {
    this.images = await this.api.images({ ids: imageIds });
    const labels = await this.api.labels();
    this.labelIndex = Object.fromEntries(labels.map((l) => [l.id, l]));
    const carried = new Set(this.images.flatMap((img) => img.label_ids));
    this.rows = [];
    for (const label of labels) {
      if (!carried.has(label.id)) continue;
      this.rows.push({ label, frequency: await this.api.labelFrequency(label.id) });
    }
    await this.poll();
    this.onChange();
  }

  props(): AnnotationMatrixProps {
    return {
      images: this.images,
      rows: this.rows,
      selectedLabels: this.selectedLabels,
      hiddenLabels: this.hiddenLabels,
      wordSpace: this.wordSpace,
      cooccurrence: this.cooccurrence,
      neighbors: this.neighbors,
      history: this.history,
      historyOpen: this.historyOpen,
      frequencyPopup: this.frequencyPopup,
      labelIndex: this.labelIndex,
      error: this.error,
    };
  }

  actions(): AnnotationActions {
    return {
      toggleLabel: (imageId, labelId, present) => void this.toggleLabel(imageId, labelId, present),
      selectLabel: (labelId) => void this.selectLabel(labelId),
      hideLabel: (labelId) => {
        // removing a word from the view is a client-side filter, not data
        if (!this.hiddenLabels.includes(labelId)) this.hiddenLabels.push(labelId);
        this.onChange();
      },
      openFrequencyPopup: (labelId) => void this.openFrequencyPopup(labelId),
      openImagePopup: () => this.onChange(),
      toggleHistory: () => {
        this.historyOpen = !this.historyOpen;
        this.onChange();
      },
      createLabel: (surface) => void this.createLabel(surface),
    };
  }

  async toggleLabel(imageId: string, labelId: string, present: boolean): Promise<void> {
    const image = this.images.find((img) => img.id === imageId);
    if (!image) return;
    const before = [...image.label_ids];
    // optimistic: flip locally, roll back if the server refuses
    image.label_ids = present
      ? [...image.label_ids, labelId].sort()
      : image.label_ids.filter((l) => l !== labelId);
    this.onChange();
    try {
      await this.api.setLabel(imageId, labelId, present, this.user);
      this.error = null;
      await this.refreshAfterMutation(labelId);
    } catch (err) {
      image.label_ids = before;
      this.error = err instanceof ApiError ? `${err.code}: ${err.detail}` : String(err);
    }
    this.onChange();
  }

  async createLabel(surface: string): Promise<void> {
    if (!surface.trim()) {
      this.error = "empty label";
      this.onChange();
      return;
    }
    try {
      const created = await this.api.createLabel(surface, this.user);
      this.labelIndex[created.label.id] = created.label;
      this.rows.push({ label: created.label, frequency: await this.api.labelFrequency(created.label.id) });
      this.error = null;
      await this.poll();
    } catch (err) {
      this.error = err instanceof ApiError ? `${err.code}: ${err.detail}` : String(err);
    }
    this.onChange();
  }

  async selectLabel(labelId: string): Promise<void> {
    if (this.selectedLabels.includes(labelId)) {
      this.selectedLabels = this.selectedLabels.filter((l) => l !== labelId);
    } else {
      this.selectedLabels = [...this.selectedLabels, labelId];
    }
    await this.refreshPanels();
    this.onChange();
  }

  async refreshPanels(): Promise<void> {
    if (this.selectedLabels.length > 0) {
      try {
        const words = await this.api.wordSpaceRecs(this.selectedLabels, 20);
        this.wordSpace = words.recommendations;
      } catch {
        this.wordSpace = [];
      }
      const cooc = await this.api.cooccurrenceRecs(this.selectedLabels, 30);
      this.cooccurrence = cooc.recommendations;
    } else {
      this.wordSpace = [];
      this.cooccurrence = [];
    }
    if (this.images.length > 0) {
      const neighbors = await this.api.imageNeighborRecs(
        this.images.map((img) => img.id),
        10,
        30,
      );
      this.neighbors = neighbors.recommendations;
    }
  }

  private async refreshAfterMutation(labelId: string): Promise<void> {
    const row = this.rows.find((r) => r.label.id === labelId);
    if (row) row.frequency = await this.api.labelFrequency(labelId);
    await this.refreshPanels();
    await this.poll();
  }

  async openFrequencyPopup(labelId: string): Promise<void> {
    this.frequencyPopup = { labelId, images: await this.api.images({ labelId }) };
    this.onChange();
  }

  /** History polling (the app calls this on a 2 s interval). */
  async poll(): Promise<void> {
    const entries = await this.api.history(0);
    this.history = entries;
    this.lastSeq = entries.length > 0 ? entries[entries.length - 1].seq : this.lastSeq;
  }
}
