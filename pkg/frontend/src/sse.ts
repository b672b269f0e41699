/** EventSource wrapper: parses the server's typed events, tracks
 * connection state for the reconnect banner, and relies on the
 * browser's native Last-Event-ID replay so reconnects lose nothing. */

import { SessionEvent } from "./types.js";
import { ConnectionState } from "./viewmodel.js";

const EVENT_TYPES = [
  "stage_entered", "text_emitted", "params_proposed",
  "image_rendered", "verdict", "done",
] as const;

export interface EventStreamHandle {
  close(): void;
}

export function subscribeEvents(
  url: string,
  onEvent: (event: SessionEvent) => void,
  onConnection: (state: ConnectionState) => void,
): EventStreamHandle {
  const source = new EventSource(url);
  onConnection("connecting");
  source.onopen = () => onConnection("open");
  source.onerror = () => {
    // EventSource retries automatically, re-sending Last-Event-ID
    onConnection(source.readyState === EventSource.CLOSED ? "closed" : "reconnecting");
  };
  const handler = (message: MessageEvent<string>) => {
    onEvent(JSON.parse(message.data) as SessionEvent);
  };
  for (const type of EVENT_TYPES) {
    source.addEventListener(type, handler as EventListener);
  }
  return {
    close() {
      source.close();
      onConnection("closed");
    },
  };
}
