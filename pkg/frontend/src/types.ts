/** Wire types mirroring the session service's JSON. */

export interface ChannelAdjustment {
  hue: number;
  saturation: number;
  luminance: number;
}

export interface ParamSet {
  exposure: number;
  contrast: number;
  highlights: number;
  shadows: number;
  whites: number;
  blacks: number;
  temp: number;
  tint: number;
  vibrance: number;
  saturation: number;
  mixer: Record<string, ChannelAdjustment>;
}

export const BASIC_FIELDS = [
  "exposure", "contrast", "highlights", "shadows", "whites",
  "blacks", "temp", "tint", "vibrance", "saturation",
] as const;

export const MIXER_CHANNELS = [
  "red", "orange", "yellow", "green", "cyan", "blue", "purple", "magenta",
] as const;

export const MIXER_COMPONENTS = ["hue", "saturation", "luminance"] as const;

export interface Approach {
  name: string;
  light: string;
  color: string;
  mixer_notes: string;
}

export type SessionEvent =
  | { seq: number; type: "stage_entered"; stage: string }
  | { seq: number; type: "text_emitted"; stage: string; text: string }
  | { seq: number; type: "params_proposed"; iteration: number; params: ParamSet }
  | { seq: number; type: "image_rendered"; iteration: number; digest: string }
  | { seq: number; type: "verdict"; iteration: number; satisfactory: boolean; critique: string }
  | { seq: number; type: "done"; outcome: string; iterations: number };

export interface SessionStateDoc {
  session_id: string;
  stage: string;
  instruction: string | null;
  strategies: Approach[];
  chosen_approach: number | null;
  plan: string | null;
  iterations: Array<{
    index: number;
    params: ParamSet;
    image_digest: string;
    verdict: { satisfactory: boolean; critique: string };
  }>;
  outcome: string | null;
  summary: string | null;
  event_seq: number;
}
