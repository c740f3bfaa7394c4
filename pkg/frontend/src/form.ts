import { parseTimeOfDay } from "./format.js";

export const MODES = ["transit", "walk", "bike", "drive", "ride_hailing"] as const;
export type Mode = (typeof MODES)[number];

export interface QueryFormState {
  originZone: string;
  destinationZone: string;
  depart: string; // HH:MM, snapped to 5 minutes
  mode: string;
  k: number;
}

export function validateForm(state: QueryFormState): string[] {
  const problems: string[] = [];
  if (!state.originZone) problems.push("origin zone required");
  if (!state.destinationZone) problems.push("destination zone required");
  if (state.originZone && state.originZone === state.destinationZone) {
    problems.push("origin and destination must differ");
  }
  if (Number.isNaN(parseTimeOfDay(state.depart))) problems.push("departure must be HH:MM");
  if (!MODES.includes(state.mode as Mode)) problems.push("unknown mode");
  if (!Number.isInteger(state.k) || state.k < 1 || state.k > 5) {
    problems.push("paths must be an integer in 1..5");
  }
  return problems;
}

export function toRiskRequest(state: QueryFormState) {
  return {
    origin: `zone:${state.originZone}`,
    destination: `zone:${state.destinationZone}`,
    depart: state.depart,
    mode: state.mode,
    k: state.k,
  };
}
