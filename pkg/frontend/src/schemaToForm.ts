/**
 * Generate parameter form fields from the algorithm registry's schemas.
 * Bounds are enforced client-side for responsiveness; the server remains
 * authoritative and re-validates everything.
 */

import type { AlgorithmInfo, ParamSchema } from "./types";

export interface FieldSpec {
  name: string;
  label: string;
  input: "number" | "select" | "weights";
  value: unknown;
  min?: number;
  integer?: boolean;
  choices?: string[];
}

export function schemaToFields(
  algorithm: AlgorithmInfo,
  runTags: string[],
): FieldSpec[] {
  return algorithm.params.map((p) => paramToField(p, runTags));
}

function paramToField(param: ParamSchema, runTags: string[]): FieldSpec {
  const label = param.description
    ? `${param.name} (${param.description})`
    : param.name;
  switch (param.type) {
    case "enum":
      return {
        name: param.name,
        label,
        input: "select",
        choices: param.choices ?? [],
        value: param.default ?? param.choices?.[0],
      };
    case "map":
      // one numeric entry per selected run, keyed by run tag
      return {
        name: param.name,
        label,
        input: "weights",
        value: Object.fromEntries(runTags.map((t) => [t, 1.0])),
        min: 0,
      };
    case "float":
      return {
        name: param.name,
        label,
        input: "number",
        value: param.default ?? 0,
        min: param.minimum,
      };
    default:
      return {
        name: param.name,
        label,
        input: "number",
        value: param.default ?? 0,
        min: param.minimum,
        integer: true,
      };
  }
}

/** Clamp an edit to the field's bounds; returns the accepted value. */
export function clampField(field: FieldSpec, raw: number): number {
  let value = field.integer ? Math.round(raw) : raw;
  if (field.min !== undefined && value < field.min) value = field.min;
  return value;
}

/** Collect current field values into the params object sent to the API. */
export function fieldsToParams(fields: FieldSpec[]): Record<string, unknown> {
  const params: Record<string, unknown> = {};
  for (const field of fields) {
    params[field.name] = field.value;
  }
  return params;
}

/** Render a field list as labelled inputs wired back into the specs. */
export function renderFields(fields: FieldSpec[]): HTMLElement {
  const container = document.createElement("div");
  container.className = "param-fields";
  for (const field of fields) {
    const wrapper = document.createElement("label");
    wrapper.className = "param-field";
    wrapper.append(field.label);
    if (field.input === "select") {
      const select = document.createElement("select");
      for (const choice of field.choices ?? []) {
        const opt = document.createElement("option");
        opt.value = choice;
        opt.textContent = choice;
        opt.selected = choice === field.value;
        select.append(opt);
      }
      select.addEventListener("change", () => {
        field.value = select.value;
      });
      wrapper.append(select);
    } else if (field.input === "weights") {
      const weights = field.value as Record<string, number>;
      for (const tag of Object.keys(weights)) {
        const entry = document.createElement("input");
        entry.type = "number";
        entry.min = "0";
        entry.value = String(weights[tag]);
        entry.title = tag;
        entry.addEventListener("change", () => {
          weights[tag] = clampField(field, Number(entry.value));
          entry.value = String(weights[tag]);
        });
        wrapper.append(` ${tag}: `, entry);
      }
    } else {
      const input = document.createElement("input");
      input.type = "number";
      if (field.min !== undefined) input.min = String(field.min);
      if (field.integer) input.step = "1";
      input.value = String(field.value);
      input.addEventListener("change", () => {
        field.value = clampField(field, Number(input.value));
        input.value = String(field.value);
      });
      wrapper.append(input);
    }
    container.append(wrapper);
  }
  return container;
}
