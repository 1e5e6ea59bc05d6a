/// <reference types="vitest/config" />
import react from "@vitejs/plugin-react";
import { defineConfig } from "vite";

export default defineConfig({
  plugins: [react()],
  server: {
    proxy: {
      // dev server forwards API calls to a locally running `topicforge serve`
      "/api": process.env.TOPICFORGE_API_URL ?? "http://127.0.0.1:8400",
    },
  },
  test: {
    environment: "jsdom",
    globals: true,
    setupFiles: ["tests/setup.ts"],
    testTimeout: 15000,
  },
});
