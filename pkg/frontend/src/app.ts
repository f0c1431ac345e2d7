/** Minimal DOM wiring for the drafting client. */

import { Candidate, LexforgeApi } from "./api.js";
import { DraftingController, normalizeSelection } from "./controller.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function candidateCard(candidate: Candidate, onAccept: () => void): HTMLElement {
  const card = document.createElement("div");
  card.className = "candidate-card";
  card.innerHTML = `
    <div class="candidate-meta">
      <span class="celex">${candidate.celex}</span>
      <span class="year">${candidate.source_year}</span>
      <span class="overlap">overlap ${candidate.descriptor_overlap}</span>
    </div>
    <p class="explanation"></p>
  `;
  (card.querySelector(".explanation") as HTMLElement).textContent = candidate.explanation;
  const accept = document.createElement("button");
  accept.textContent = "Accept citation";
  accept.addEventListener("click", onAccept);
  card.appendChild(accept);
  return card;
}

export function mountApp(baseUrl: string): DraftingController {
  const controller = new DraftingController(new LexforgeApi(baseUrl));
  const draft = el<HTMLTextAreaElement>("draft-text");
  const caseBadge = el<HTMLSpanElement>("case-badge");
  const candidates = el<HTMLDivElement>("candidates");
  const generationPane = el<HTMLDivElement>("generation");
  const preview = el<HTMLPreElement>("article-preview");
  const errorBar = el<HTMLDivElement>("error-bar");

  function render(): void {
    const s = controller.state;
    errorBar.textContent = s.error ?? "";
    caseBadge.textContent = s.lastLookup ? s.lastLookup.case : "";
    candidates.replaceChildren();
    if (s.lastLookup) {
      for (const candidate of s.lastLookup.candidates) {
        candidates.appendChild(
          candidateCard(candidate, () => {
            void controller.acceptCandidate(candidate).then(render, render);
          }),
        );
      }
      if (s.lastLookup.case === "NotFound") {
        const generate = document.createElement("button");
        generate.textContent = "Generate definition";
        generate.addEventListener("click", () => {
          void controller.requestGeneration().then(render, render);
        });
        candidates.appendChild(generate);
      }
    }
    generationPane.replaceChildren();
    if (s.pendingGeneration) {
      const g = s.pendingGeneration;
      const text = document.createElement("p");
      text.textContent = g.definition;
      const badge = document.createElement("span");
      badge.className = g.length_ok ? "length-ok" : "length-warning";
      badge.textContent = `${g.word_count} words${g.length_ok ? "" : " (outside 25-45)"}`;
      const accept = document.createElement("button");
      accept.textContent = "Accept";
      accept.addEventListener("click", () => {
        void controller.acceptPendingGeneration().then(render, render);
      });
      const discard = document.createElement("button");
      discard.textContent = "Discard";
      discard.addEventListener("click", () => {
        controller.discardPending();
        render();
      });
      generationPane.append(text, badge, accept, discard);
    }
    preview.textContent = s.articlePreview;
  }

  el<HTMLButtonElement>("lookup-button").addEventListener("click", () => {
    const selection = normalizeSelection(
      draft.value.substring(draft.selectionStart ?? 0, draft.selectionEnd ?? 0),
    );
    if (!selection) {
      return;
    }
    void controller.selectTerm(selection).then(render, render);
  });

  el<HTMLButtonElement>("new-session").addEventListener("click", () => {
    void controller
      .createSession(el<HTMLInputElement>("session-title").value, [], [
        { kind: "article", heading: "Article 1 Draft", paragraphs: [draft.value] },
      ])
      .then(render, render);
  });

  return controller;
}
