import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "./api.js";
import { FakeServer } from "./testing/fakeServer.js";

describe("ApiClient", () => {
  it("fetches the scene snapshot", async () => {
    const server = new FakeServer();
    const api = new ApiClient("", server.fetch);
    const snapshot = await api.getScene();
    expect(snapshot.version).toBe(0);
    expect(snapshot.scene.items).toHaveLength(8);
  });

  it("posts edits as JSON", async () => {
    const server = new FakeServer();
    const api = new ApiClient("", server.fetch);
    const response = await api.submitEdit({ instruction: "delete lamp_left" });
    expect(response.ok).toBe(true);
    expect(server.editCalls[0]).toEqual({ instruction: "delete lamp_left" });
  });

  it("raises ApiError with the server detail on 4xx", async () => {
    const server = new FakeServer();
    const api = new ApiClient("", server.fetch);
    await expect(api.submitEdit({ instruction: "delete ghost" })).rejects.toThrowError(
      ApiError,
    );
    await expect(api.submitEdit({ instruction: "delete ghost" })).rejects.toMatchObject({
      status: 400,
      detail: "no scene object matches 'ghost'",
    });
  });

  it("builds asset urls against the configured base", () => {
    const api = new ApiClient("http://127.0.0.1:8823");
    expect(api.assetUrl("bed1")).toBe("http://127.0.0.1:8823/assets/bed1");
  });
});
