import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    environment: "node",
    // the live-server suite spawns the platform and waits for
    // simulated device runs, so hooks and tests get a generous budget
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
