/** Browser entry point; the service URL comes from ?api= or same-origin. */

import { Api } from "./api.js";
import { createApp } from "./app.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? "";
const root = document.getElementById("app");
if (!root) throw new Error("missing #app container");
createApp(root, { api: new Api({ baseUrl }) });
