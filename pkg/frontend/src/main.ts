import { TrainerApi } from "./api.js";
import { TrainerApp } from "./app.js";

const root = document.getElementById("app");
if (root) {
  // serve the app from any static server and point it at the trainer
  // service with ?api=http://127.0.0.1:8765 (same-origin by default)
  const query = new URLSearchParams(window.location.search);
  const api = new TrainerApi(query.get("api") ?? "");
  const app = new TrainerApp(root, api);
  const sessionId = window.location.hash.replace(/^#\/?/, "") || undefined;
  void app.start(sessionId);
}
