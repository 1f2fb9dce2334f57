/** Chat panel flow: grounded in the last report, disabled until one exists,
 * 502 failures append a retryable error entry instead of losing the turn. */

import { ApiClient, ApiError } from "./api.js";
import type { UiState } from "./state.js";

export interface ChatOutcome {
  entries: { role: string; text: string }[];
  retryable: boolean;
}

export async function sendChat(
  state: UiState,
  api: ApiClient,
  message: string,
): Promise<ChatOutcome> {
  if (!state.chatEnabled() || state.report === null) {
    return {
      entries: [],
      retryable: false,
    };
  }
  state.appendChat({ role: "user", text: message });
  try {
    const reply = await api.chat(message, state.report.report_id);
    state.appendChat({ role: "assistant", text: reply });
    return { entries: state.transcript, retryable: false };
  } catch (err) {
    const detail = err instanceof ApiError ? err.detail : String(err);
    const retryable = err instanceof ApiError && err.status === 502;
    state.appendChat({
      role: "error",
      text: retryable ? `backend unavailable (${detail}) — retry` : detail,
    });
    return { entries: state.transcript, retryable };
  }
}
