/**
 * Browser entry point: wires the HTTP client to the views, renders into
 * #app, and polls history/jobs every two seconds.
 */

import { HttpApi } from "./api.js";
import { AnnotationController } from "./controller.js";
import { initialState } from "./state.js";
import { toDom } from "./vdom.js";
import { annotationMatrixView } from "./views/annotation.js";

const POLL_MS = 2000;

export async function boot(root: HTMLElement, base = ""): Promise<void> {
  const api = new HttpApi(base);
  const user = new URLSearchParams(window.location.search).get("user") ?? "anonymous";
  initialState(user);

  const images = await api.images();
  const firstLabeled = images.filter((img) => img.label_ids.length > 0).slice(0, 6);
  const controller = new AnnotationController(api, user, render);

  function render(): void {
    const tree = annotationMatrixView(controller.props(), controller.actions());
    root.replaceChildren(toDom(tree, document));
  }

  await controller.open(firstLabeled.map((img) => img.id));
  render();
  window.setInterval(() => {
    void controller.poll().then(render);
  }, POLL_MS);
}

const mount = typeof document !== "undefined" ? document.getElementById("app") : null;
if (mount) {
  void boot(mount);
}
