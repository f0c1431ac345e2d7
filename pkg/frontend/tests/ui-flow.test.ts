/** Integration tests: the controller against the real service with the mock generator. */

import { spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, dirname } from "node:path";
import { fileURLToPath } from "node:url";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { LexforgeApi, SectionPayload } from "../src/api.js";
import { DraftingController, normalizeSelection } from "../src/controller.js";

const here = dirname(fileURLToPath(import.meta.url));
const PORT = 8931;
const BASE_URL = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let dataDir: string;

const DRAFT_SECTIONS: SectionPayload[] = [
  {
    kind: "article",
    heading: "Article 3 Obligations",
    paragraphs: [
      "A fuel producer shall account for all electricity used in production. " +
        "The fuel producer shall conclude renewables power purchase agreements. " +
        "Where a fuel producer sources electricity from the grid, the fuel producer " +
        "shall demonstrate temporal correlation within a bidding zone.",
    ],
  },
];

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const resp = await fetch(`${BASE_URL}/v1/sessions/none`);
      if (resp.status === 404) {
        return;
      }
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
  throw new Error("service did not start");
}

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "lexforge-ui-"));
  server = spawn(
    "python3",
    [
      "-m",
      "lexforge.cli",
      "serve",
      "--port",
      String(PORT),
      "--defs",
      join(here, "fixtures", "defs-resolved.jsonl"),
      "--mock-generator",
    ],
    {
      cwd: join(here, "..", ".."),
      env: { ...process.env, LEXFORGE_DATA_DIR: dataDir },
      stdio: "inherit",
    },
  );
  await waitForServer();
}, 30000);

afterAll(() => {
  server?.kill();
  rmSync(dataDir, { recursive: true, force: true });
});

function newController(): DraftingController {
  return new DraftingController(new LexforgeApi(BASE_URL));
}

describe("selection normalization", () => {
  it("collapses whitespace only", () => {
    expect(normalizeSelection("  bidding \n zone ")).toBe("bidding zone");
    expect(normalizeSelection("Bidding Zone")).toBe("Bidding Zone");
  });
});

describe("drafting workflow", () => {
  it("completes the Single case: select, lookup, accept citation, preview", async () => {
    const controller = newController();
    await controller.createSession("renewable fuels draft", ["energy policy"], DRAFT_SECTIONS);
    expect(controller.canAccept).toBe(false);

    const outcome = await controller.selectTerm(" bidding  zone ");
    expect(outcome?.case).toBe("Single");
    expect(controller.state.lastLookup?.candidates[0].celex).toBe("32019R0943");
    expect(controller.canAccept).toBe(true);

    await controller.acceptCandidate(controller.state.lastLookup!.candidates[0]);
    expect(controller.state.acceptedDefinitions).toHaveLength(1);
    expect(controller.state.articlePreview).toContain("(1) 'bidding zone'");
  });

  it("completes the NotFound case: generate, accept, preview", async () => {
    const controller = newController();
    await controller.createSession("renewable fuels draft", [], DRAFT_SECTIONS);

    const outcome = await controller.selectTerm("fuel producer");
    expect(outcome?.case).toBe("NotFound");
    expect(outcome?.candidates).toHaveLength(0);
    expect(controller.canAccept).toBe(false);

    const generated = await controller.requestGeneration();
    expect(generated.term).toBe("fuel producer");
    expect(generated.word_count).toBe(generated.definition.split(/\s+/).length);
    expect(controller.canAccept).toBe(true);
    // generation is a proposal; nothing accepted yet
    expect(controller.state.acceptedDefinitions).toHaveLength(0);

    await controller.acceptPendingGeneration();
    expect(controller.state.pendingGeneration).toBeNull();
    expect(controller.state.acceptedDefinitions).toHaveLength(1);
    expect(controller.state.articlePreview).toContain("(1)");
  });

  it("surfaces EmptyContext when the term is absent from the draft", async () => {
    const controller = newController();
    await controller.createSession("draft", [], DRAFT_SECTIONS);
    await controller.selectTerm("quantum flux");
    await expect(controller.requestGeneration()).rejects.toThrow();
    expect(controller.state.error).toBeTruthy();
  });

  it("rejects duplicate accepted terms inline", async () => {
    const controller = newController();
    await controller.createSession("draft", [], DRAFT_SECTIONS);
    await controller.selectTerm("bidding zone");
    await controller.acceptCandidate(controller.state.lastLookup!.candidates[0]);
    await expect(
      controller.acceptCandidate(controller.state.lastLookup!.candidates[0]),
    ).rejects.toThrow();
    expect(controller.state.error).toContain("bidding zone");
    expect(controller.state.acceptedDefinitions).toHaveLength(1);
  });

  it("discarding a pending generation clears state without a server call", async () => {
    const controller = newController();
    await controller.createSession("draft", [], DRAFT_SECTIONS);
    await controller.selectTerm("fuel producer");
    await controller.requestGeneration();
    const accepted = controller.state.acceptedDefinitions.length;
    controller.discardPending();
    expect(controller.state.pendingGeneration).toBeNull();
    expect(controller.state.acceptedDefinitions).toHaveLength(accepted);
  });

  it("reload reconstructs identical server-derived state", async () => {
    const controller = newController();
    await controller.createSession("reload draft", ["energy policy"], DRAFT_SECTIONS);
    await controller.selectTerm("bidding zone");
    await controller.acceptCandidate(controller.state.lastLookup!.candidates[0]);
    await controller.selectTerm("fuel producer");
    const generated = await controller.requestGeneration();
    await controller.acceptPendingGeneration();

    const sessionId = controller.state.sessionId!;
    const reloaded = newController();
    await reloaded.load(sessionId);

    expect(reloaded.state.sessionId).toBe(sessionId);
    expect(reloaded.state.title).toBe(controller.state.title);
    expect(reloaded.state.sections).toEqual(controller.state.sections);
    expect(reloaded.state.acceptedDefinitions).toEqual(controller.state.acceptedDefinitions);
    expect(reloaded.state.articlePreview).toBe(controller.state.articlePreview);
    expect(reloaded.state.acceptedDefinitions[1].text).toBe(generated.definition);
    // local-only state resets on reload
    expect(reloaded.state.selectedTerm).toBeNull();
    expect(reloaded.state.pendingGeneration).toBeNull();
  });
});
