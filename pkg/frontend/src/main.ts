import { ApiClient } from "./api.js";
import { initApp } from "./app.js";

// Same-origin by default; set window.SEMVID_API_BASE before this module
// loads to point the UI at a service running elsewhere.
declare global {
  interface Window {
    SEMVID_API_BASE?: string;
  }
}

initApp(document, new ApiClient(window.SEMVID_API_BASE ?? ""));
