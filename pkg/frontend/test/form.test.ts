import { describe, expect, it } from "vitest";

import { renderSpecForm } from "../src/form.js";
import { Session } from "../src/state.js";
import { MARRIED } from "./fixtures.js";

function mounted(): { session: Session; form: HTMLElement } {
  const session = new Session();
  session.loadSpec(MARRIED);
  const form = renderSpecForm(session);
  document.body.replaceChildren(form);
  return { session, form };
}

describe("spec form", () => {
  it("renders a dropdown with exactly the declared categorical values", () => {
    const { form } = mounted();
    const select = form.querySelector(
      'select[name="relationship"]') as HTMLSelectElement;
    const options = Array.from(select.options).map((o) => o.value);
    expect(options).toEqual(["husband", "wife", "unmarried"]);
  });

  it("bounds the numeric input and rejects out-of-range values client-side", () => {
    const { session, form } = mounted();
    const age = form.querySelector('input[name="age"]') as HTMLInputElement;
    expect(age.min).toBe("17");
    expect(age.max).toBe("90");
    session.setField("age", "40");
    age.value = "16";
    age.dispatchEvent(new Event("change"));
    expect(session.instance.age).toBe(40);  // unchanged
    expect(age.classList.contains("invalid")).toBe(true);
    expect((form.querySelector(".field-error") as HTMLElement).textContent)
      .toMatch(/outside/);
  });

  it("offers direction options on numeric features only", () => {
    const { form } = mounted();
    const labels = (name: string) =>
      Array.from(form.querySelectorAll(
        `.toggle-group[data-feature="${name}"] label`))
        .map((l) => l.textContent);
    expect(labels("age")).toEqual(
      ["any", "fixed", "increase-only", "decrease-only"]);
    expect(labels("gender")).toEqual(["any", "fixed", "must change"]);
  });

  it("initializes toggles from the spec's mutability declarations", () => {
    const { form } = mounted();
    const checked = (name: string) =>
      (form.querySelector(
        `input[name="toggle-${name}"]:checked`) as HTMLInputElement).value;
    expect(checked("relationship")).toBe("any");
    expect(checked("gender")).toBe("fixed");
    expect(checked("age")).toBe("increase");
  });

  it("propagates toggle clicks into the session", () => {
    const { session, form } = mounted();
    const radio = form.querySelector(
      'input[name="toggle-gender"][value="change"]') as HTMLInputElement;
    radio.click();
    expect(session.toggles.gender).toBe("change");
    expect(session.buildRequest().restrictions.gender).toBe(1);
  });
});
