import { defineConfig } from "vitest/config";

export default defineConfig({
  server: {
    proxy: {
      // during development the API runs separately (`fuseval serve`)
      "/api": "http://127.0.0.1:8000",
    },
  },
  test: {
    environment: "happy-dom",
  },
});
