import { ApiClient } from "./api.js";
import { renderApp } from "./render.js";
import { Wizard } from "./wizard.js";

const root = document.getElementById("app");
if (root) {
  renderApp(root, new Wizard(new ApiClient("")));
}
