package com.example.text;

import org.junit.Test;

import static org.junit.Assert.assertEquals;
import static org.junit.Assert.assertFalse;
import static org.junit.Assert.assertNotNull;

public class TestGreeter {

    /* Verifies that greeting a named user embeds the provided name in the message */
    @Test
    public void greetNamedUser() {
        Greeter greeter = new Greeter();
        assertEquals("greeting must include the name", "Hello, Ada!", greeter.greet("Ada"));
    }

    /* Checks that greeting an empty name falls back to the anonymous greeting */
    @Test
    public void greetEmptyName() {
        Greeter greeter = new Greeter();
        String message = greeter.greet("");
        assertNotNull("greeting must never be null", message);
        assertEquals("empty names get the stranger greeting", "Hello, stranger!", message);
    }

    /* Ensures that a rude message is not classified as polite by the greeter */
    @Test
    public void rudeMessageIsNotPolite() {
        Greeter greeter = new Greeter();
        assertFalse("rude text must not count as polite", greeter.isPolite("Go away"));
    }
}
