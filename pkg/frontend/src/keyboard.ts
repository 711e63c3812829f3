// Keyboard layer: one key per reviewer action.
//   A      accept the archive label (archive_correct)
//   M      accept the model's prediction (relabel to it)
//   R      open the region picker, then arrows/enter choose the region
//   O      mark out-of-domain
//   U      mark unusable quality
//   Enter  confirm the staged verdict (POST, then advance)
//   Z      undo: re-open the previous candidate
//   Esc    clear the staged verdict / close the picker

import type { CandidateItem } from "./types";
import type { StagedChoice } from "./store";

export type KeyAction =
    | { kind: "stage"; choice: StagedChoice }
    | { kind: "open-picker" }
    | { kind: "confirm" }
    | { kind: "undo" }
    | { kind: "clear" }
    | { kind: "none" };

export function actionForKey(key: string, candidate: CandidateItem | null): KeyAction {
    switch (key.toLowerCase()) {
        case "a":
            return candidate
                ? {
                      kind: "stage",
                      choice: {
                          decision: "archive_correct",
                          label: `archive label ${candidate.archive_label} is correct`,
                      },
                  }
                : { kind: "none" };
        case "m":
            return candidate
                ? {
                      kind: "stage",
                      choice: {
                          decision: "relabel",
                          relabelTo: candidate.prediction,
                          label: `relabel to model prediction ${candidate.prediction}`,
                      },
                  }
                : { kind: "none" };
        case "r":
            return { kind: "open-picker" };
        case "o":
            return {
                kind: "stage",
                choice: { decision: "out_of_domain", label: "out of domain" },
            };
        case "u":
            return {
                kind: "stage",
                choice: { decision: "unusable", label: "unusable quality" },
            };
        case "enter":
            return { kind: "confirm" };
        case "z":
            return { kind: "undo" };
        case "escape":
            return { kind: "clear" };
        default:
            return { kind: "none" };
    }
}

export function stageForRegion(region: string): StagedChoice {
    return {
        decision: "relabel",
        relabelTo: region,
        label: `relabel to ${region}`,
    };
}
