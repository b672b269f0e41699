/** Change-set computation between two parameter documents, matching the
 * server's canonical field order and dotted paths. Values are compared
 * exactly as received; no rounding. */

import { BASIC_FIELDS, MIXER_CHANNELS, MIXER_COMPONENTS, ParamSet } from "./types.js";

export interface FieldChange {
  path: string;
  old: number;
  next: number;
}

export function fieldPaths(): string[] {
  const paths: string[] = [...BASIC_FIELDS];
  for (const channel of MIXER_CHANNELS) {
    for (const component of MIXER_COMPONENTS) {
      paths.push(`mixer.${channel}.${component}`);
    }
  }
  return paths;
}

export function getField(params: ParamSet, path: string): number {
  const parts = path.split(".");
  if (parts.length === 1) {
    return params[path as keyof ParamSet] as number;
  }
  const channel = params.mixer[parts[1] as string];
  if (channel === undefined) return 0;
  return channel[parts[2] as keyof typeof channel];
}

export function paramDiff(before: ParamSet, after: ParamSet): FieldChange[] {
  const changes: FieldChange[] = [];
  for (const path of fieldPaths()) {
    const old = getField(before, path);
    const next = getField(after, path);
    if (old !== next) {
      changes.push({ path, old, next });
    }
  }
  return changes;
}

export function changedPaths(before: ParamSet, after: ParamSet): string[] {
  return paramDiff(before, after).map((c) => c.path);
}
